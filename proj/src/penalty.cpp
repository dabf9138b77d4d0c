#include "mlsqr/penalty.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mlsqr {

namespace {

void check_t(double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("penalty argument t must be nonnegative");
}

}  // namespace

PenaltySpec PenaltySpec::tikhonov(double tau) { return {PenaltyKind::tikhonov, 1.0, tau}; }
PenaltySpec PenaltySpec::tv_smoothed(double threshold, double tau) {
  return {PenaltyKind::tv_smoothed, threshold, tau};
}
PenaltySpec PenaltySpec::perona_malik_log(double threshold, double tau) {
  return {PenaltyKind::perona_malik_log, threshold, tau};
}
PenaltySpec PenaltySpec::perona_malik_exp(double threshold, double tau) {
  return {PenaltyKind::perona_malik_exp, threshold, tau};
}

void PenaltySpec::validate() const {
  if (kind != PenaltyKind::tikhonov && !(threshold > 0.0)) {
    throw std::invalid_argument("penalty threshold T must be positive");
  }
  if (!(tau >= 0.0)) throw std::invalid_argument("penalty strength tau must be nonnegative");
}

double r_value(const PenaltySpec& spec, double t) {
  check_t(t);
  const double T = spec.threshold;
  switch (spec.kind) {
    case PenaltyKind::tikhonov:
      return 0.5 * t * t;
    case PenaltyKind::tv_smoothed:
      return std::hypot(T, t);  // = T sqrt(1 + (t/T)^2)
    case PenaltyKind::perona_malik_log: {
      const double u = t / T;
      return 0.5 * T * T * std::log1p(u * u);
    }
    case PenaltyKind::perona_malik_exp: {
      const double u = t / T;
      return 0.5 * T * T * (1.0 - std::exp(-u * u));
    }
  }
  return 0.0;
}

double r_deriv(const PenaltySpec& spec, double t) {
  check_t(t);
  return diffusivity(spec, t) * t;
}

double diffusivity(const PenaltySpec& spec, double t) {
  check_t(t);
  const double T = spec.threshold;
  double c = 1.0;
  switch (spec.kind) {
    case PenaltyKind::tikhonov:
      return 1.0;
    case PenaltyKind::tv_smoothed:
      c = 1.0 / std::hypot(T, t);
      break;
    case PenaltyKind::perona_malik_log: {
      const double u = t / T;
      // for huge u the direct form would overflow u^2; switch to (T/t)^2
      c = u > 1e8 ? (T / t) * (T / t) : 1.0 / (1.0 + u * u);
      break;
    }
    case PenaltyKind::perona_malik_exp: {
      const double u = t / T;
      c = std::exp(-u * u);
      break;
    }
  }
  // exp(-u^2) underflows to 0 around u ~ 27; keep the map strictly elliptic
  return std::max(c, std::numeric_limits<double>::min());
}

}  // namespace mlsqr
