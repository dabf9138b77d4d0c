#pragma once

namespace mlsqr {

/// Edge-preserving penalty integrands r(t), t = |grad f|.
enum class PenaltyKind {
  tikhonov,          // r(t) = t^2 / 2
  tv_smoothed,       // r(t) = T sqrt(1 + (t/T)^2)
  perona_malik_log,  // r(t) = T^2/2 log(1 + (t/T)^2)
  perona_malik_exp,  // r(t) = T^2/2 (1 - exp(-t^2/T^2))
};

struct PenaltySpec {
  PenaltyKind kind = PenaltyKind::tikhonov;
  double threshold = 1.0;  // T, ignored by tikhonov
  double tau = 0.0;        // prior strength

  static PenaltySpec tikhonov(double tau = 0.0);
  static PenaltySpec tv_smoothed(double threshold, double tau = 0.0);
  static PenaltySpec perona_malik_log(double threshold, double tau = 0.0);
  static PenaltySpec perona_malik_exp(double threshold, double tau = 0.0);

  void validate() const;  // threshold > 0 (except tikhonov), tau >= 0
};

double r_value(const PenaltySpec& spec, double t);

/// Analytic derivative r'(t). Computed as diffusivity(t) * t so the identity
/// r'(t) = c(t) t holds exactly in floating point.
double r_deriv(const PenaltySpec& spec, double t);

/// c(t) = r'(t) / t with the removable singularity at t = 0 filled in by its
/// limit (1 for tikhonov and both Perona-Malik kinds, 1/T for smoothed TV).
/// Strictly positive and finite for every t >= 0.
double diffusivity(const PenaltySpec& spec, double t);

}  // namespace mlsqr
