#pragma once

#include <cstdint>
#include <vector>

#include "twrn/types.hpp"

namespace twrn {

struct WzResult {
  double rate = 0.0;            // bits; upper bound on the Wyner-Ziv minimum
  Channel helper_channel;       // p(a | x), Markov A - X - Y by construction
  std::vector<int> decoder;     // pi1 flattened over (a, y) -> xhat index
  std::size_t n_a = 0;
  double achieved_distortion = 0.0;
  int n_starts_used = 0;
  std::uint64_t best_start_seed = 0;
  int iterations = 0;
  bool converged = true;
};

// Wyner-Ziv RD for source X with decoder-only side information Y (which = 1)
// or the swapped problem (which = 2). Helper cardinality |A| = |X| + 1.
// Non-convex; multi-start alternation of decoder and helper updates.
WzResult wyner_ziv_rd(const JointSource& src, int which, double d, const SolverConfig& cfg);

struct CapacitySolve {
  double value = 0.0;  // bits
  std::vector<double> input_pmf;
  double achieved_cost = 0.0;
  double upper_bound = 0.0;  // bits; dual certificate
  int iterations = 0;
  bool converged = true;
};

// C^add(d, N): capacity of the modulo-l additive-noise channel under the
// input cost sum p_W(x) delta[x] <= d. Concave maximization, solved exactly.
CapacitySolve additive_capacity(std::size_t l, const std::vector<double>& delta,
                                double d, const std::vector<double>& noise,
                                const SolverConfig& cfg);

struct MinimaxCapacitySolve {
  double value = 0.0;  // bits
  std::vector<double> worst_noise;
  double residual = 0.0;  // change over the final refinement; no attainment claim
  int iterations = 0;
  bool converged = true;
};

// C(d) = inf over admissible noise pmfs of C^add(d, N). Convex in the noise;
// exhaustive-grid + ternary refinement for binary alphabets, simplex grid
// seeding plus projected subgradient descent in general.
MinimaxCapacitySolve minimax_capacity(std::size_t l, const std::vector<double>& delta,
                                      double d, const SolverConfig& cfg);

}  // namespace twrn
