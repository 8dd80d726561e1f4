#include "twrn/rd_solvers.hpp"

#include <algorithm>
#include <cmath>

#include "twrn/errors.hpp"

namespace twrn {

namespace {

constexpr double kLn2 = 0.6931471805599453094172321;

RdResult from_constrained(ba::ConstrainedResult res, std::vector<std::size_t> in_dims,
                          std::vector<std::size_t> out_dims) {
  RdResult r;
  r.rate = std::max(res.value_bits, 0.0);
  r.channel.in_dims = std::move(in_dims);
  r.channel.out_dims = std::move(out_dims);
  r.channel.probs = std::move(res.channel);
  r.achieved_distortions = std::move(res.achieved);
  r.iterations = res.iterations;
  r.converged = res.converged;
  r.lagrange_multipliers = std::move(res.multipliers);
  r.dual_value = res.dual_bits;
  return r;
}

void require_nonnegative(double d, const char* what) {
  if (!(d >= 0.0)) throw Error(ErrorCode::DomainError, std::string(what) + " must be >= 0");
}

}  // namespace

ba::ConstrainedOptions constrained_options(const SolverConfig& cfg) {
  ba::ConstrainedOptions opt;
  opt.inner_tol_nats = std::clamp(cfg.tol * kLn2 * 1e-3, 1e-15, 1e-6);
  opt.inner_max_iters = cfg.max_iters;
  opt.bisect_iters = 60;
  return opt;
}

RdResult marginal_rd(const std::vector<double>& q_x, const Mat& delta, double d,
                     const SolverConfig& cfg) {
  cfg.validate();
  require_nonnegative(d, "distortion");
  if (delta.rows != q_x.size())
    throw Error(ErrorCode::ShapeMismatch, "delta rows do not match source pmf");
  auto q = validate_pmf(q_x);

  ba::CmiTerm term;
  term.group.assign(q.size(), 0);
  term.n_groups = 1;
  term.weight = 1.0;
  std::vector<ba::ConstraintSpec> cons(1);
  cons[0].delta = delta;
  cons[0].target = d;
  auto res = ba::constrained_min(q, delta.cols, {term}, cons, constrained_options(cfg));
  return from_constrained(std::move(res), {q.size()}, {delta.cols});
}

RdResult conditional_rd_general(const Mat& q_xs, const Mat& delta, double d,
                                const SolverConfig& cfg) {
  require_nonnegative(d, "distortion");
  const std::size_t nx = q_xs.rows, ns = q_xs.cols, nxh = delta.cols;
  if (delta.rows != nx)
    throw Error(ErrorCode::ShapeMismatch, "delta rows do not match source pmf");

  // Inputs flattened as z = x * ns + s; the term conditions on s.
  std::vector<double> q(nx * ns);
  ba::CmiTerm term;
  term.group.resize(nx * ns);
  term.n_groups = static_cast<int>(ns);
  term.weight = 1.0;
  Mat dmat(nx * ns, nxh, 0.0);
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t s = 0; s < ns; ++s) {
      std::size_t z = x * ns + s;
      q[z] = q_xs(x, s);
      term.group[z] = static_cast<int>(s);
      for (std::size_t v = 0; v < nxh; ++v) dmat(z, v) = delta(x, v);
    }
  std::vector<ba::ConstraintSpec> cons(1);
  cons[0].delta = std::move(dmat);
  cons[0].target = d;
  auto res = ba::constrained_min(q, nxh, {term}, cons, constrained_options(cfg));
  return from_constrained(std::move(res), {nx, ns}, {nxh});
}

RdResult conditional_rd(const JointSource& src, int which, double d,
                        const SolverConfig& cfg) {
  cfg.validate();
  if (which != 1 && which != 2)
    throw Error(ErrorCode::DomainError, "which must be 1 or 2");
  if (which == 1) {
    return conditional_rd_general(src.q_xy, src.delta1, d, cfg);
  }
  // Swap roles: source Y with side information X.
  Mat q_yx(src.ny(), src.nx());
  for (std::size_t x = 0; x < src.nx(); ++x)
    for (std::size_t y = 0; y < src.ny(); ++y) q_yx(y, x) = src.q_xy(x, y);
  return conditional_rd_general(q_yx, src.delta2, d, cfg);
}

RdResult joint_rd(const JointSource& src, double d1, double d2, const SolverConfig& cfg) {
  cfg.validate();
  require_nonnegative(d1, "d1");
  require_nonnegative(d2, "d2");
  const std::size_t nx = src.nx(), ny = src.ny(), nxh = src.nxhat(), nyh = src.nyhat();
  const std::size_t n_in = nx * ny, n_out = nxh * nyh;

  ba::CmiTerm term;
  term.group.assign(n_in, 0);
  term.n_groups = 1;
  term.weight = 1.0;

  std::vector<ba::ConstraintSpec> cons(2);
  cons[0].delta = Mat(n_in, n_out, 0.0);
  cons[1].delta = Mat(n_in, n_out, 0.0);
  cons[0].target = d1;
  cons[1].target = d2;
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < ny; ++y)
      for (std::size_t xh = 0; xh < nxh; ++xh)
        for (std::size_t yh = 0; yh < nyh; ++yh) {
          std::size_t z = x * ny + y, v = xh * nyh + yh;
          cons[0].delta(z, v) = src.delta1(x, xh);
          cons[1].delta(z, v) = src.delta2(y, yh);
        }
  auto res = ba::constrained_min(src.q_xy.a, n_out, {term}, cons, constrained_options(cfg));
  return from_constrained(std::move(res), {nx, ny}, {nxh, nyh});
}

std::vector<std::pair<double, double>> rd_curve(RdSolverId id, const JointSource& src,
                                                const std::vector<double>& grid,
                                                const SolverConfig& cfg) {
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (grid[i] < grid[i - 1])
      throw Error(ErrorCode::DomainError, "distortion grid must be sorted ascending");

  std::vector<std::pair<double, double>> out;
  out.reserve(grid.size());
  for (double d : grid) {
    double rate = 0.0;
    switch (id) {
      case RdSolverId::MarginalX:
        rate = marginal_rd(src.q_x(), src.delta1, d, cfg).rate;
        break;
      case RdSolverId::MarginalY:
        rate = marginal_rd(src.q_y(), src.delta2, d, cfg).rate;
        break;
      case RdSolverId::ConditionalX:
        rate = conditional_rd(src, 1, d, cfg).rate;
        break;
      case RdSolverId::ConditionalY:
        rate = conditional_rd(src, 2, d, cfg).rate;
        break;
      case RdSolverId::Joint:
        rate = joint_rd(src, d, d, cfg).rate;
        break;
    }
    out.emplace_back(d, rate);
  }
  return out;
}

}  // namespace twrn
