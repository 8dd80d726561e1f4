#include "twrn/cr_rd.hpp"

#include <algorithm>
#include <cmath>

#include "twrn/ba.hpp"
#include "twrn/bounds.hpp"
#include "twrn/errors.hpp"
#include "twrn/rd_solvers.hpp"

namespace twrn {

namespace {

void require_nonnegative(double d, const char* what) {
  if (!(d >= 0.0)) throw Error(ErrorCode::DomainError, std::string(what) + " must be >= 0");
}

}  // namespace

// Grouping terms for I(X;V|Y) and I(Y;V|X) over inputs z = x*ny + y.
void cr_terms(std::size_t nx, std::size_t ny, ba::CmiTerm& given_y, ba::CmiTerm& given_x) {
  given_y.group.resize(nx * ny);
  given_x.group.resize(nx * ny);
  given_y.n_groups = static_cast<int>(ny);
  given_x.n_groups = static_cast<int>(nx);
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < ny; ++y) {
      given_y.group[x * ny + y] = static_cast<int>(y);
      given_x.group[x * ny + y] = static_cast<int>(x);
    }
}

CrResult cr_rd(const JointSource& src, double d1, double d2, const SolverConfig& cfg) {
  cfg.validate();
  require_nonnegative(d1, "d1");
  require_nonnegative(d2, "d2");
  const std::size_t nx = src.nx(), ny = src.ny(), nxh = src.nxhat(), nyh = src.nyhat();
  const std::size_t n_in = nx * ny, n_out = nxh * nyh;

  ba::CmiTerm t1, t2;
  cr_terms(nx, ny, t1, t2);

  std::vector<ba::ConstraintSpec> cons(2);
  cons[0].delta = Mat(n_in, n_out, 0.0);
  cons[1].delta = Mat(n_in, n_out, 0.0);
  cons[0].target = d1;
  cons[1].target = d2;
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < ny; ++y)
      for (std::size_t xh = 0; xh < nxh; ++xh)
        for (std::size_t yh = 0; yh < nyh; ++yh) {
          cons[0].delta(x * ny + y, xh * nyh + yh) = src.delta1(x, xh);
          cons[1].delta(x * ny + y, xh * nyh + yh) = src.delta2(y, yh);
        }

  auto res = ba::minimax_two_cmi(src.q_xy.a, n_out, t1, t2, cons, constrained_options(cfg));

  CrResult out;
  out.rate = std::max(res.value_bits, 0.0);
  out.channel.in_dims = {nx, ny};
  out.channel.out_dims = {nxh, nyh};
  out.channel.probs = std::move(res.channel);
  out.mi_x = res.mi1_bits;
  out.mi_y = res.mi2_bits;
  out.achieved_distortions = std::move(res.achieved);
  out.iterations = res.iterations;
  out.converged = res.converged;
  out.dual_value = res.dual_bits;
  return out;
}

double cr_rd_joint_upper(const JointSource& src, double d1, double d2,
                         const SolverConfig& cfg) {
  double r_xy = joint_rd(src, d1, d2, cfg).rate;
  double r_x = marginal_rd(src.q_x(), src.delta1, d1, cfg).rate;
  double r_y = marginal_rd(src.q_y(), src.delta2, d2, cfg).rate;
  return std::max(std::max(r_xy - r_x, r_xy - r_y), 0.0);
}

CrResult cr_rd_max_distortion(const JointSource& src, double d1, const SolverConfig& cfg) {
  cfg.validate();
  require_nonnegative(d1, "d1");
  const std::size_t nx = src.nx(), ny = src.ny(), nxh = src.nxhat();
  const std::size_t n_in = nx * ny;

  ba::CmiTerm t1, t2;
  cr_terms(nx, ny, t1, t2);

  std::vector<ba::ConstraintSpec> cons(1);
  cons[0].delta = Mat(n_in, nxh, 0.0);
  cons[0].target = d1;
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < ny; ++y)
      for (std::size_t xh = 0; xh < nxh; ++xh)
        cons[0].delta(x * ny + y, xh) = src.delta1(x, xh);

  auto res = ba::minimax_two_cmi(src.q_xy.a, nxh, t1, t2, cons, constrained_options(cfg));

  CrResult out;
  out.rate = std::max(res.value_bits, 0.0);
  out.channel.in_dims = {nx, ny};
  out.channel.out_dims = {nxh};
  out.channel.probs = std::move(res.channel);
  out.mi_x = res.mi1_bits;
  out.mi_y = res.mi2_bits;
  out.achieved_distortions = std::move(res.achieved);
  out.iterations = res.iterations;
  out.converged = res.converged;
  out.dual_value = res.dual_bits;
  return out;
}

std::vector<CrSweepRow> cr_equality_sweep(const JointSource& src,
                                          const std::vector<std::pair<double, double>>& points,
                                          const SolverConfig& cfg) {
  std::vector<CrSweepRow> rows;
  rows.reserve(points.size());
  for (auto [d1, d2] : points) {
    CrSweepRow row;
    row.d1 = d1;
    row.d2 = d2;
    auto cr = cr_rd(src, d1, d2, cfg);
    double rl = cut_set_lower(src, d1, d2, cfg);
    row.r_cr = cr.rate;
    row.mi_x = cr.mi_x;
    row.mi_y = cr.mi_y;
    row.gap_to_rl = cr.rate - rl;
    row.equality = row.gap_to_rl < 5.0 * cfg.tol;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace twrn
