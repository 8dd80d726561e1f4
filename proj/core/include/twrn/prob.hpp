#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "twrn/errors.hpp"

namespace twrn {

// Row-major dense matrix; the workhorse for pmfs, distortion tables and
// conditional channels at desk-scale alphabets.
struct Mat {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> a;

  Mat() = default;
  Mat(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), a(r * c, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

  std::span<double> row(std::size_t i) { return {a.data() + i * cols, cols}; }
  std::span<const double> row(std::size_t i) const { return {a.data() + i * cols, cols}; }

  static Mat from_rows(const std::vector<std::vector<double>>& rows_in);
};

// 3-way pmf with dims (n0, n1, n2), index order [i0][i1][i2].
struct Tensor3 {
  std::size_t n0 = 0, n1 = 0, n2 = 0;
  std::vector<double> a;

  Tensor3() = default;
  Tensor3(std::size_t d0, std::size_t d1, std::size_t d2, double fill = 0.0)
      : n0(d0), n1(d1), n2(d2), a(d0 * d1 * d2, fill) {}

  double& operator()(std::size_t i, std::size_t j, std::size_t k) {
    return a[(i * n1 + j) * n2 + k];
  }
  double operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return a[(i * n1 + j) * n2 + k];
  }
};

inline constexpr double kProbFloor = 1e-15;       // entries below this clamp to zero
inline constexpr double kPmfInputDrift = 1e-9;    // accepted drift for external inputs
inline constexpr double kPmfInternalDrift = 1e-12;

// x*log2(x) with 0 log 0 := 0.
double plog2p(double p);

// Validates p >= 0 and sum within `drift` of 1, clamps sub-floor entries to
// zero and renormalizes. Throws NegativeProbability / NotNormalized.
std::vector<double> validate_pmf(std::vector<double> p, double drift = kPmfInputDrift);

double sum(std::span<const double> p);

// Entropy in bits of an arbitrary nonnegative vector treated as a pmf.
double entropy_bits(std::span<const double> p);

// h(lambda) on [0,1]; DomainError outside.
double binary_entropy(double lambda);

// a*b = a(1-b) + (1-a)b; DomainError outside [0,1]^2.
double binary_convolution(double a, double b);

std::vector<double> row_marginal(const Mat& joint);  // sum over columns
std::vector<double> col_marginal(const Mat& joint);  // sum over rows

// I(R;C) of a joint pmf matrix, bits.
double mutual_information_bits(const Mat& joint);

// I(A;C|B) of a 3-way joint pmf, conditioning on the given axis (0, 1 or 2).
// The remaining two axes, in index order, play the roles of A and C.
double conditional_mutual_information_bits(const Tensor3& joint, int conditioning_axis);

}  // namespace twrn
