#include "twrn/closed_forms.hpp"

#include <cmath>

#include "twrn/errors.hpp"
#include "twrn/prob.hpp"

namespace twrn::dsbs {

namespace {

void check_rho(double rho) {
  if (!(rho >= 0.0 && rho <= 0.5))
    throw Error(ErrorCode::DomainError, "rho must lie in [0, 1/2]");
}

// 2x2 BSC kernel as a lambda-friendly accessor.
inline double bsc(double eps, int in, int out) { return in == out ? 1.0 - eps : eps; }

}  // namespace

JointSource make_source(double rho) {
  check_rho(rho);
  JointSource s;
  s.q_xy = Mat(2, 2);
  s.q_xy(0, 0) = s.q_xy(1, 1) = 0.5 * (1.0 - rho);
  s.q_xy(0, 1) = s.q_xy(1, 0) = 0.5 * rho;
  s.delta1 = Mat(2, 2);
  s.delta1(0, 1) = s.delta1(1, 0) = 1.0;
  s.delta2 = s.delta1;
  return validate_joint_source(std::move(s));
}

double rd(double rho, double d) {
  check_rho(rho);
  if (!(d >= 0.0 && d <= 1.0))
    throw Error(ErrorCode::DomainError, "d must lie in [0, 1]");
  if (d >= rho) return 0.0;
  return binary_entropy(rho) - binary_entropy(d);
}

double d_star(double rho) {
  check_rho(rho);
  return 0.5 - 0.5 * std::sqrt(1.0 - 2.0 * rho);
}

double cr_upper(double rho, double d) {
  check_rho(rho);
  double ds = d_star(rho);
  if (!(d > ds && d <= 0.5))
    throw Error(ErrorCode::DomainError, "cr_upper defined for d in (d*, 1/2]");
  double alpha = (2.0 * d - rho) / (2.0 * (1.0 - rho));
  return binary_entropy(d) - rho - (1.0 - rho) * binary_entropy(alpha);
}

double wyner_common_information(double rho) {
  check_rho(rho);
  return 1.0 + binary_entropy(rho) - 2.0 * binary_entropy(d_star(rho));
}

Channel cascade_channel(double rho, double d) {
  check_rho(rho);
  double ds = d_star(rho);
  if (!(d >= 0.0 && d <= ds + 1e-15))
    throw Error(ErrorCode::DomainError, "cascade channel defined for d in [0, d*]");
  d = std::min(d, ds);
  // beta solves d conv beta = d*; at d = 1/2 (rho = 1/2) the chain collapses.
  double beta = (1.0 - 2.0 * d) > 1e-15 ? (ds - d) / (1.0 - 2.0 * d) : 0.0;

  // p(x, xhat, w, yhat, y) = 1/2 BSC_d BSC_beta BSC_beta BSC_d, then divide
  // out q(x,y).
  Mat probs(4, 4, 0.0);
  Mat qxy(2, 2, 0.0);
  for (int x = 0; x < 2; ++x)
    for (int xh = 0; xh < 2; ++xh)
      for (int w = 0; w < 2; ++w)
        for (int yh = 0; yh < 2; ++yh)
          for (int y = 0; y < 2; ++y) {
            double p = 0.5 * bsc(d, x, xh) * bsc(beta, xh, w) * bsc(beta, w, yh) *
                       bsc(d, yh, y);
            probs(x * 2 + y, xh * 2 + yh) += p;
            qxy(x, y) += p;
          }
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int v = 0; v < 4; ++v) probs(x * 2 + y, v) /= qxy(x, y);
  return Channel::validated({2, 2}, {2, 2}, std::move(probs), 1e-12);
}

Channel four_input_channel(double rho, double d) {
  check_rho(rho);
  double ds = d_star(rho);
  if (!(d >= ds - 1e-15 && d <= 0.5))
    throw Error(ErrorCode::DomainError, "four-input channel defined for d in [d*, 1/2]");
  double alpha = (2.0 * d - rho) / (2.0 * (1.0 - rho));

  // Agreement inputs see a BSC(alpha) toward their common value; disagreement
  // inputs emit a fair coin.
  Mat probs(4, 2, 0.0);
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int w = 0; w < 2; ++w) {
        double p;
        if (x == y)
          p = (w == x) ? 1.0 - alpha : alpha;
        else
          p = 0.5;
        probs(x * 2 + y, w) = p;
      }
  return Channel::validated({2, 2}, {2}, std::move(probs), 1e-12);
}

FigureTable figure_curves(double rho, const std::vector<double>& grid) {
  check_rho(rho);
  FigureTable t;
  t.rho = rho;
  t.d_star = d_star(rho);
  t.rows.reserve(grid.size());
  for (double d : grid) {
    if (!(d >= 0.0 && d <= 0.5))
      throw Error(ErrorCode::DomainError, "figure grid points must lie in [0, 1/2]");
    FigureRow row;
    row.d = d;
    row.r = rd(rho, d);
    row.past_dstar = d > t.d_star;
    if (row.past_dstar) row.cr_upper = cr_upper(rho, d);
    t.rows.push_back(row);
  }
  return t;
}

std::vector<double> default_figure_grid(double step) {
  std::vector<double> g;
  for (double d = 0.0; d < 0.5 + step * 0.5; d += step) g.push_back(std::min(d, 0.5));
  return g;
}

}  // namespace twrn::dsbs

namespace twrn::gaussian {

void GaussianSpec::validate() const {
  if (!(sigma_x2 > 0.0) || !(sigma_y2 > 0.0))
    throw Error(ErrorCode::DomainError, "variances must be positive");
  if (!(rho > -1.0 && rho < 1.0))
    throw Error(ErrorCode::DomainError, "correlation must lie in (-1, 1)");
}

double conditional_rd(const GaussianSpec& spec, int which, double d) {
  spec.validate();
  if (which != 1 && which != 2)
    throw Error(ErrorCode::DomainError, "which must be 1 or 2");
  if (!(d > 0.0)) throw Error(ErrorCode::DomainError, "d must be positive");
  double s2 = (which == 1 ? spec.sigma_x2 : spec.sigma_y2) * (1.0 - spec.rho * spec.rho);
  if (d >= s2) return 0.0;
  return 0.5 * std::log2(s2 / d);
}

double region(const GaussianSpec& spec, double d1, double d2) {
  return std::max(conditional_rd(spec, 1, d1), conditional_rd(spec, 2, d2));
}

}  // namespace twrn::gaussian
