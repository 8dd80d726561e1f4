#pragma once

#include <cstddef>
#include <vector>

#include "twrn/prob.hpp"

namespace twrn::ba {

// Every alternating-minimization loop in this library tracks its objective
// per round; rounds that move the wrong way by more than 1e-12 nats are
// counted here. The verification suites assert the counter stays at zero.
long monotonicity_violations();
void reset_monotonicity_counter();

// One conditional-mutual-information term I(S; V | T): `group` maps each
// flattened input symbol z to the value of its conditioning variable T, so
// the term reads I(input; output | group). A constant group gives plain
// mutual information I(input; output).
struct CmiTerm {
  std::vector<int> group;
  int n_groups = 1;
  double weight = 1.0;
};

// Minimize  sum_j weight_j * I_j(p)  +  sum_{z,v} q(z) p(v|z) cost(z,v)
// over channels p(v|z). Weights must sum to 1 (the row update needs the
// log p coefficients to collapse). cost is in nats. mask, when present,
// pins p(v|z) = 0 outside the allowed support.
struct InnerProblem {
  const std::vector<double>* q = nullptr;
  std::size_t n_out = 0;
  std::vector<CmiTerm> terms;
  const Mat* cost = nullptr;
  const std::vector<char>* mask = nullptr;
};

struct InnerResult {
  Mat channel;
  double value_nats = 0.0;             // full objective incl. cost term
  std::vector<double> term_nats;       // per-term CMI at the final channel
  double cost_nats = 0.0;              // sum q p cost
  double lower_bound_nats = 0.0;       // convex cut: value_nats >= optimum >= this
  int iterations = 0;
  bool converged = false;
};

InnerResult minimize_weighted_cmi(const InnerProblem& prob, const Mat* warm,
                                  double tol_nats, int max_iters);

// Linear distortion constraint sum q p delta <= target on the same channel.
struct ConstraintSpec {
  Mat delta;
  double target = 0.0;
};

struct ConstrainedOptions {
  double inner_tol_nats = 1e-13;
  int inner_max_iters = 20000;
  int bisect_iters = 48;
  int golden_iters = 32;  // outer weight search in minimax_two_cmi
  double slope_cap = 1e12;
};

struct ConstrainedResult {
  Mat channel;
  double value_bits = 0.0;            // weighted objective at `channel`
  std::vector<double> term_bits;      // per-term CMI, bits
  std::vector<double> achieved;      // per-constraint distortion
  std::vector<double> multipliers;   // slopes in bits per distortion unit
  double dual_bits = 0.0;            // best Lagrangian lower bound seen
  int iterations = 0;
  bool converged = false;
};

// Exact solver for the convex program min sum_j w_j I_j subject to up to two
// distortion constraints. Constraints with target 0 become hard support
// masks; positive targets are met by slope bisection plus a final convex
// mix of the bracketing channels, so the returned channel is feasible and
// the rate sits on the lower convex envelope.
ConstrainedResult constrained_min(const std::vector<double>& q, std::size_t n_out,
                                  std::vector<CmiTerm> terms,
                                  const std::vector<ConstraintSpec>& constraints,
                                  const ConstrainedOptions& opt = {});

struct MinimaxResult {
  Mat channel;
  double value_bits = 0.0;  // max(term1 - shift1, term2 - shift2)
  double mi1_bits = 0.0;
  double mi2_bits = 0.0;
  std::vector<double> achieved;
  std::vector<double> multipliers;
  double lambda = 0.5;      // maximizing weight on term 1
  double dual_bits = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Minimize max{I_1 - shift1, I_2 - shift2} over the constrained channel set.
// Solved through the concave dual  max_{lambda in [0,1]} g(lambda)  with
// g(lambda) the constrained weighted minimum, then a final mix to balance
// the two terms when the maximizer is interior.
MinimaxResult minimax_two_cmi(const std::vector<double>& q, std::size_t n_out,
                              const CmiTerm& term1, const CmiTerm& term2,
                              const std::vector<ConstraintSpec>& constraints,
                              const ConstrainedOptions& opt = {},
                              double shift1_bits = 0.0, double shift2_bits = 0.0);

// Maximize sum_j weight_j I(W; Out_j) - slope * cost over input pmfs, the
// Arimoto ascent. channels[j] is n_in x n_out_j. Returns the final input
// distribution; upper_bound_nats certifies value <= optimum <= upper bound.
struct CapacityResult {
  std::vector<double> p_in;
  double value_nats = 0.0;
  std::vector<double> term_nats;
  double cost_value = 0.0;
  double upper_bound_nats = 0.0;
  int iterations = 0;
  bool converged = false;
};

CapacityResult maximize_weighted_capacity(const std::vector<Mat>& channels,
                                          const std::vector<double>& weights,
                                          const std::vector<double>* cost,
                                          double cost_slope_nats,
                                          const std::vector<char>* input_mask,
                                          const std::vector<double>* warm,
                                          double tol_nats, int max_iters);

}  // namespace twrn::ba
