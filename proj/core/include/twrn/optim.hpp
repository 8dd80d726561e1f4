#pragma once

#include <functional>
#include <vector>

namespace twrn {

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  int evaluations = 0;
};

// Compact Nelder-Mead for the small non-convex polish steps. Deterministic:
// ties broken by index, fixed coefficients (1, 2, 0.5, 0.5).
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> x0, double step, int max_evals);

}  // namespace twrn
