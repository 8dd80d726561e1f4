#include "twrn/optim.hpp"

#include <algorithm>
#include <cmath>

namespace twrn {

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> x0, double step, int max_evals) {
  const std::size_t n = x0.size();
  int evals = 0;
  auto eval = [&](const std::vector<double>& x) {
    ++evals;
    return f(x);
  };

  std::vector<std::vector<double>> pts(n + 1, x0);
  std::vector<double> val(n + 1);
  for (std::size_t i = 1; i <= n; ++i) pts[i][i - 1] += step;
  for (std::size_t i = 0; i <= n; ++i) val[i] = eval(pts[i]);

  std::vector<std::size_t> order(n + 1);
  while (evals < max_evals) {
    for (std::size_t i = 0; i <= n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return val[a] < val[b]; });
    std::size_t best = order[0], worst = order[n], second = order[n - 1];
    if (val[worst] - val[best] < 1e-12) break;

    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t k = 0; k < n; ++k) centroid[k] += pts[i][k];
    }
    for (auto& c : centroid) c /= static_cast<double>(n);

    auto blend = [&](double coef) {
      std::vector<double> x(n);
      for (std::size_t k = 0; k < n; ++k)
        x[k] = centroid[k] + coef * (pts[worst][k] - centroid[k]);
      return x;
    };

    auto xr = blend(-1.0);
    double fr = eval(xr);
    if (fr < val[best]) {
      auto xe = blend(-2.0);
      double fe = eval(xe);
      if (fe < fr) {
        pts[worst] = std::move(xe);
        val[worst] = fe;
      } else {
        pts[worst] = std::move(xr);
        val[worst] = fr;
      }
    } else if (fr < val[second]) {
      pts[worst] = std::move(xr);
      val[worst] = fr;
    } else {
      auto xc = blend(fr < val[worst] ? -0.5 : 0.5);
      double fc = eval(xc);
      if (fc < std::min(fr, val[worst])) {
        pts[worst] = std::move(xc);
        val[worst] = fc;
      } else {
        // shrink toward the best vertex
        for (std::size_t i = 0; i <= n; ++i) {
          if (i == best) continue;
          for (std::size_t k = 0; k < n; ++k)
            pts[i][k] = pts[best][k] + 0.5 * (pts[i][k] - pts[best][k]);
          val[i] = eval(pts[i]);
        }
      }
    }
  }

  NelderMeadResult out;
  std::size_t best = 0;
  for (std::size_t i = 1; i <= n; ++i)
    if (val[i] < val[best]) best = i;
  out.x = pts[best];
  out.value = val[best];
  out.evaluations = evals;
  return out;
}

}  // namespace twrn
