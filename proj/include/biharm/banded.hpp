#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace biharm {

// Symmetric band matrix in LAPACK upper band storage (column major,
// ab[(kd + i - j) + j * (kd + 1)] holds A(i, j) for max(0, j - kd) <= i <= j).
// Only one triangle is stored, so the matrix is exactly symmetric.
class BandedSymmetric {
 public:
  BandedSymmetric() = default;
  BandedSymmetric(std::size_t n, std::size_t kd) : n_(n), kd_(kd), ab_((kd + 1) * n, 0.0) {}

  std::size_t size() const noexcept { return n_; }
  std::size_t bandwidth() const noexcept { return kd_; }

  // Zero outside the band.
  double operator()(std::size_t i, std::size_t j) const;
  void add(std::size_t i, std::size_t j, double value);  // i, j in either order

  std::vector<double> multiply(std::span<const double> x) const;
  double quadratic_form(std::span<const double> x, std::span<const double> y) const;

  std::vector<double> to_dense() const;  // row major n x n
  double max_abs_row_sum() const;

  std::span<const double> storage() const noexcept { return ab_; }
  std::size_t leading_dimension() const noexcept { return kd_ + 1; }

 private:
  std::size_t n_ = 0;
  std::size_t kd_ = 0;
  std::vector<double> ab_;
};

}  // namespace biharm
