#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "twrn/prob.hpp"

namespace twrn {

// Conditional pmf tensor. Inputs and outputs are flattened row-major over
// in_dims / out_dims; probs(i, o) = p(out o | input i) and every row is a
// pmf (sums to 1 within 1e-12 after validation).
struct Channel {
  std::vector<std::size_t> in_dims;
  std::vector<std::size_t> out_dims;
  Mat probs;

  std::size_t n_in() const { return probs.rows; }
  std::size_t n_out() const { return probs.cols; }

  static Channel validated(std::vector<std::size_t> in_dims,
                           std::vector<std::size_t> out_dims, Mat probs,
                           double drift = kPmfInputDrift);
};

// Two-terminal source: joint pmf over X x Y plus the per-receiver distortion
// tables. delta1 is |X| x |Xhat|, delta2 is |Y| x |Yhat|; both normal (every
// row contains a zero).
struct JointSource {
  std::vector<std::string> x_alphabet;
  std::vector<std::string> y_alphabet;
  std::vector<std::string> xhat_alphabet;
  std::vector<std::string> yhat_alphabet;
  Mat q_xy;
  Mat delta1;
  Mat delta2;

  std::size_t nx() const { return q_xy.rows; }
  std::size_t ny() const { return q_xy.cols; }
  std::size_t nxhat() const { return delta1.cols; }
  std::size_t nyhat() const { return delta2.cols; }

  std::vector<double> q_x() const { return row_marginal(q_xy); }
  std::vector<double> q_y() const { return col_marginal(q_xy); }

  double d1_max() const;
  double d2_max() const;

  // Largest useful targets: the distortion a decoder reaches from side
  // information alone (zero rate). Anything at or above collapses to rate 0.
  double d1_zero_rate() const;
  double d2_zero_rate() const;
};

// Throws NegativeProbability / NotNormalized / NonNormalDistortion /
// ShapeMismatch; returns the normalized source on success.
JointSource validate_joint_source(JointSource raw);

struct SolverConfig {
  int max_iters = 10000;
  double tol = 1e-9;        // convergence threshold on rates, bits
  int n_starts = 32;        // multi-start count for the non-convex solvers
  int grid_resolution = 20; // simplex step 1/k for the oracle
  std::uint64_t seed = 1;

  void validate() const;
};

struct SolveCertificate {
  int iterations = 0;
  bool converged = true;
  double dual_gap = 0.0;  // bits; primal minus best dual bound where available
};

struct RdResult {
  double rate = 0.0;  // bits
  Channel channel;
  std::vector<double> achieved_distortions;
  int iterations = 0;
  bool converged = true;
  std::vector<double> lagrange_multipliers;
  double dual_value = 0.0;  // bits; best Lagrangian dual bound seen
};

// Expected distortion of `channel` against the source's delta1 (which = 1)
// or delta2 (which = 2). The channel may map X, (X,Y) or any input layout
// whose flattened index is consistent with the source; see implementation
// notes in types.cpp.
double expected_distortion(const JointSource& src, const Channel& channel, int which);

}  // namespace twrn
