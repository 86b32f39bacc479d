#include "biharm/banded.hpp"

#include <algorithm>
#include <cmath>

#include "biharm/error.hpp"

namespace biharm {

double BandedSymmetric::operator()(std::size_t i, std::size_t j) const {
  if (i > j) std::swap(i, j);
  if (j >= n_ || j - i > kd_) return 0.0;
  return ab_[(kd_ + i - j) + j * (kd_ + 1)];
}

void BandedSymmetric::add(std::size_t i, std::size_t j, double value) {
  if (i > j) std::swap(i, j);
  if (j >= n_ || j - i > kd_) throw Error(ErrorKind::kArgument, "banded add outside the band");
  ab_[(kd_ + i - j) + j * (kd_ + 1)] += value;
}

std::vector<double> BandedSymmetric::multiply(std::span<const double> x) const {
  std::vector<double> y(n_, 0.0);
  for (std::size_t j = 0; j < n_; ++j) {
    const std::size_t i0 = j > kd_ ? j - kd_ : 0;
    for (std::size_t i = i0; i < j; ++i) {
      const double a = ab_[(kd_ + i - j) + j * (kd_ + 1)];
      y[i] += a * x[j];
      y[j] += a * x[i];
    }
    y[j] += ab_[kd_ + j * (kd_ + 1)] * x[j];
  }
  return y;
}

double BandedSymmetric::quadratic_form(std::span<const double> x, std::span<const double> y) const {
  const auto ay = multiply(y);
  double s = 0.0;
  for (std::size_t i = 0; i < n_; ++i) s += x[i] * ay[i];
  return s;
}

std::vector<double> BandedSymmetric::to_dense() const {
  std::vector<double> d(n_ * n_, 0.0);
  for (std::size_t j = 0; j < n_; ++j) {
    const std::size_t i0 = j > kd_ ? j - kd_ : 0;
    for (std::size_t i = i0; i <= j; ++i) {
      const double a = ab_[(kd_ + i - j) + j * (kd_ + 1)];
      d[i * n_ + j] = a;
      d[j * n_ + i] = a;
    }
  }
  return d;
}

double BandedSymmetric::max_abs_row_sum() const {
  std::vector<double> rows(n_, 0.0);
  for (std::size_t j = 0; j < n_; ++j) {
    const std::size_t i0 = j > kd_ ? j - kd_ : 0;
    for (std::size_t i = i0; i < j; ++i) {
      const double a = std::abs(ab_[(kd_ + i - j) + j * (kd_ + 1)]);
      rows[i] += a;
      rows[j] += a;
    }
    rows[j] += std::abs(ab_[kd_ + j * (kd_ + 1)]);
  }
  return rows.empty() ? 0.0 : *std::max_element(rows.begin(), rows.end());
}

}  // namespace biharm
