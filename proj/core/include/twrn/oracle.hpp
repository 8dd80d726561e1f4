#pragma once

#include <cstdint>
#include <vector>

#include "twrn/types.hpp"

namespace twrn::oracle {

enum class Objective {
  MarginalRdX,
  MarginalRdY,
  ConditionalRdX,
  ConditionalRdY,
  JointRd,
  CrRd,
  WynerZivX,
  WynerZivY,
  OneDescription,
  HeegardBerger,
};

struct GridSpec {
  int k = 10;                      // simplex step 1/k per channel row
  Objective objective = Objective::MarginalRdX;
  double d1 = 0.0;
  double d2 = 0.0;                 // ignored by single-constraint objectives
  std::size_t aux_card = 0;        // |A| or |C| override; 0 = objective default
  std::uint64_t budget = 100000000;  // maximum channel evaluations
};

struct OracleResult {
  double value_bits = 0.0;
  Channel argmin;
  double guaranteed_gap = 0.0;  // value - gap <= true optimum <= value
  std::uint64_t evaluations = 0;
  std::uint64_t feasible_count = 0;
};

// Exhaustive minimum of the chosen objective over all channels whose rows
// lie on the 1/k simplex grid. Deterministic for a fixed GridSpec (parallel
// chunks reduce in index order). Throws BudgetExceeded before enumerating
// when the grid is too large.
OracleResult grid_min_channel(const JointSource& src, const GridSpec& grid,
                              const SolverConfig& cfg);

// Number of channels the spec would enumerate (used for budget guards).
std::uint64_t grid_size(const JointSource& src, const GridSpec& grid);

// All decoder tables (c, y) -> xhat, lexicographic, duplicate-free.
std::vector<std::vector<int>> enumerate_decoders(int c_card, int y_card, int xhat_card,
                                                 std::uint64_t budget = 100000000);

}  // namespace twrn::oracle
