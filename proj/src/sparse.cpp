#include "mlsqr/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace mlsqr {

SparseSpd SparseSpd::from_triplets(std::size_t n, std::span<const Triplet> entries,
                                   double shift) {
  std::map<std::pair<std::size_t, std::size_t>, double> acc;
  for (const Triplet& t : entries) {
    if (t.row >= n || t.col >= n) {
      throw DimensionError("triplet index out of range");
    }
    acc[{t.row, t.col}] += t.value;
  }
  for (std::size_t i = 0; i < n; ++i) acc[{i, i}] += shift;

  SparseSpd m;
  m.n_ = n;
  m.shift_ = shift;
  m.offsets_.assign(n + 1, 0);
  m.cols_.reserve(acc.size());
  m.values_.reserve(acc.size());
  for (const auto& [key, value] : acc) {
    m.offsets_[key.first + 1]++;
    m.cols_.push_back(key.second);
    m.values_.push_back(value);
  }
  for (std::size_t i = 0; i < n; ++i) m.offsets_[i + 1] += m.offsets_[i];

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = m.offsets_[i]; k < m.offsets_[i + 1]; ++k) {
      if (m.entry(m.cols_[k], i) != m.values_[k]) {
        throw std::invalid_argument("matrix is not symmetric at (" + std::to_string(i) +
                                    ", " + std::to_string(m.cols_[k]) + ")");
      }
    }
  }
  return m;
}

SparseSpd SparseSpd::from_dense(std::size_t n, std::span<const double> row_major,
                                double shift) {
  if (row_major.size() != n * n) throw DimensionError("dense storage does not match n*n");
  std::vector<Triplet> trips;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double v = row_major[i * n + j];
      if (v != 0.0 || i == j) trips.push_back({i, j, v});
    }
  }
  return from_triplets(n, trips, shift);
}

SparseSpd SparseSpd::identity(std::size_t n) {
  std::vector<Triplet> trips;
  trips.reserve(n);
  for (std::size_t i = 0; i < n; ++i) trips.push_back({i, i, 1.0});
  return from_triplets(n, trips, 0.0);
}

void SparseSpd::multiply(std::span<const double> x, std::span<double> y) const {
  if (x.size() != n_ || y.size() != n_) throw DimensionError("matvec dimension mismatch");
  for (std::size_t i = 0; i < n_; ++i) {
    double acc = 0.0;
    for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) {
      acc += values_[k] * x[cols_[k]];
    }
    y[i] = acc;
  }
}

std::vector<double> SparseSpd::multiply(std::span<const double> x) const {
  std::vector<double> y(n_);
  multiply(x, y);
  return y;
}

double SparseSpd::quadratic_form(std::span<const double> x) const {
  if (x.size() != n_) throw DimensionError("quadratic form dimension mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    double row = 0.0;
    for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) {
      row += values_[k] * x[cols_[k]];
    }
    acc += x[i] * row;
  }
  return acc;
}

double SparseSpd::entry(std::size_t i, std::size_t j) const {
  const auto begin = cols_.begin() + static_cast<std::ptrdiff_t>(offsets_[i]);
  const auto end = cols_.begin() + static_cast<std::ptrdiff_t>(offsets_[i + 1]);
  const auto it = std::lower_bound(begin, end, j);
  if (it == end || *it != j) return 0.0;
  return values_[static_cast<std::size_t>(it - cols_.begin())];
}

double SparseSpd::max_diagonal() const {
  double m = 0.0;
  for (std::size_t i = 0; i < n_; ++i) m = std::max(m, entry(i, i));
  return m;
}

double SparseSpd::frobenius_norm() const {
  double acc = 0.0;
  for (double v : values_) acc += v * v;
  return std::sqrt(acc);
}

std::vector<double> SparseSpd::to_dense() const {
  std::vector<double> dense(n_ * n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) {
      dense[i * n_ + cols_[k]] = values_[k];
    }
  }
  return dense;
}

SparseSpd SparseSpd::with_shift(double new_shift) const {
  SparseSpd m = *this;
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t k = m.offsets_[i]; k < m.offsets_[i + 1]; ++k) {
      if (m.cols_[k] == i) m.values_[k] += new_shift - shift_;
    }
  }
  m.shift_ = new_shift;
  return m;
}

}  // namespace mlsqr
