#include "twrn/jscc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "twrn/ba.hpp"
#include "twrn/cr_rd.hpp"
#include "twrn/errors.hpp"
#include "twrn/bounds.hpp"
#include "twrn/prob.hpp"
#include "twrn/rd_solvers.hpp"

namespace twrn {

namespace {

constexpr double kLn2 = 0.6931471805599453094172321;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMarginTol = 1e-6;  // verdicts inside +-tol report Boundary

Verdict verdict_from_margin(double margin) {
  if (margin >= kMarginTol) return Verdict::Feasible;
  if (margin <= -kMarginTol) return Verdict::Infeasible;
  return Verdict::Boundary;
}

}  // namespace

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Feasible: return "feasible";
    case Verdict::Infeasible: return "infeasible";
    case Verdict::Boundary: return "boundary";
  }
  return "unknown";
}

Mat BroadcastChannelSpec::channel_u() const {
  Mat m(nw(), nu(), 0.0);
  for (std::size_t w = 0; w < nw(); ++w)
    for (std::size_t u = 0; u < nu(); ++u)
      for (std::size_t v = 0; v < nv(); ++v) m(w, u) += q_uv_w(w, u, v);
  return m;
}

Mat BroadcastChannelSpec::channel_v() const {
  Mat m(nw(), nv(), 0.0);
  for (std::size_t w = 0; w < nw(); ++w)
    for (std::size_t u = 0; u < nu(); ++u)
      for (std::size_t v = 0; v < nv(); ++v) m(w, v) += q_uv_w(w, u, v);
  return m;
}

BroadcastChannelSpec validate_broadcast(BroadcastChannelSpec raw) {
  if (raw.q_uv_w.n0 == 0 || raw.q_uv_w.n1 == 0 || raw.q_uv_w.n2 == 0)
    throw Error(ErrorCode::ShapeMismatch, "empty broadcast channel tensor");
  if (!(raw.kappa > 0.0))
    throw Error(ErrorCode::DomainError, "kappa must be positive");
  auto fix_labels = [](std::vector<std::string>& v, std::size_t n) {
    if (v.empty())
      for (std::size_t i = 0; i < n; ++i) v.push_back(std::to_string(i));
    else if (v.size() != n)
      throw Error(ErrorCode::ShapeMismatch, "alphabet size mismatch in broadcast channel");
  };
  fix_labels(raw.w_alphabet, raw.q_uv_w.n0);
  fix_labels(raw.u_alphabet, raw.q_uv_w.n1);
  fix_labels(raw.v_alphabet, raw.q_uv_w.n2);
  for (std::size_t w = 0; w < raw.nw(); ++w) {
    std::vector<double> slice(raw.nu() * raw.nv());
    for (std::size_t u = 0; u < raw.nu(); ++u)
      for (std::size_t v = 0; v < raw.nv(); ++v) slice[u * raw.nv() + v] = raw.q_uv_w(w, u, v);
    slice = validate_pmf(std::move(slice));
    for (std::size_t u = 0; u < raw.nu(); ++u)
      for (std::size_t v = 0; v < raw.nv(); ++v) raw.q_uv_w(w, u, v) = slice[u * raw.nv() + v];
  }
  return raw;
}

namespace {

FrontierPoint frontier_point(const Mat& ch_u, const Mat& ch_v, double lambda,
                             const SolverConfig& cfg, const std::vector<double>* warm) {
  const double tol_nats = std::clamp(cfg.tol * kLn2 * 1e-3, 1e-15, 1e-6);
  auto r = ba::maximize_weighted_capacity({ch_u, ch_v}, {lambda, 1.0 - lambda}, nullptr,
                                          0.0, nullptr, warm, tol_nats, cfg.max_iters);
  FrontierPoint p;
  p.lambda = lambda;
  p.mi_u = r.term_nats[0] / kLn2;
  p.mi_v = r.term_nats[1] / kLn2;
  p.p_w = std::move(r.p_in);
  return p;
}

}  // namespace

std::vector<FrontierPoint> channel_mi_frontier(const BroadcastChannelSpec& bc,
                                               int n_weights, const SolverConfig& cfg) {
  cfg.validate();
  if (n_weights < 2) throw Error(ErrorCode::DomainError, "n_weights must be >= 2");
  const Mat ch_u = bc.channel_u(), ch_v = bc.channel_v();
  std::vector<FrontierPoint> pts(n_weights);
  std::vector<double> warm;
  for (int i = 0; i < n_weights; ++i) {
    double lambda = static_cast<double>(i) / (n_weights - 1);
    pts[i] = frontier_point(ch_u, ch_v, lambda, cfg, warm.empty() ? nullptr : &warm);
    warm = pts[i].p_w;
  }
  return pts;
}

namespace {

// Maximize min{kappa*mi_u - need_x, kappa*mi_v - need_y} along the frontier.
// The objective is concave along the frontier curve; grid plus local
// refinement on lambda.
struct MarginSearch {
  double margin = -kInf;
  FrontierPoint best;
};

MarginSearch best_margin(const BroadcastChannelSpec& bc, double need_x, double need_y,
                         const SolverConfig& cfg) {
  const Mat ch_u = bc.channel_u(), ch_v = bc.channel_v();
  auto margin_of = [&](const FrontierPoint& p) {
    return std::min(bc.kappa * p.mi_u - need_x, bc.kappa * p.mi_v - need_y);
  };

  MarginSearch out;
  const int grid = 65;
  std::vector<double> warm;
  std::vector<FrontierPoint> pts(grid);
  for (int i = 0; i < grid; ++i) {
    double lambda = static_cast<double>(i) / (grid - 1);
    pts[i] = frontier_point(ch_u, ch_v, lambda, cfg, warm.empty() ? nullptr : &warm);
    warm = pts[i].p_w;
    double m = margin_of(pts[i]);
    if (m > out.margin) {
      out.margin = m;
      out.best = pts[i];
    }
  }
  // Ternary refinement around the incumbent lambda.
  double lo = std::max(0.0, out.best.lambda - 1.0 / (grid - 1));
  double hi = std::min(1.0, out.best.lambda + 1.0 / (grid - 1));
  for (int it = 0; it < 40; ++it) {
    double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
    auto p1 = frontier_point(ch_u, ch_v, m1, cfg, &out.best.p_w);
    auto p2 = frontier_point(ch_u, ch_v, m2, cfg, &out.best.p_w);
    double v1 = margin_of(p1), v2 = margin_of(p2);
    if (v1 > out.margin) {
      out.margin = v1;
      out.best = p1;
    }
    if (v2 > out.margin) {
      out.margin = v2;
      out.best = p2;
    }
    if (v1 <= v2)
      lo = m1;
    else
      hi = m2;
  }
  return out;
}

}  // namespace

FeasibilityVerdict jscc_cut_set_feasible(const JointSource& src,
                                         const BroadcastChannelSpec& bc, double d1,
                                         double d2, const SolverConfig& cfg) {
  cfg.validate();
  double need_x = conditional_rd(src, 1, d1, cfg).rate;
  double need_y = conditional_rd(src, 2, d2, cfg).rate;
  auto ms = best_margin(bc, need_x, need_y, cfg);

  FeasibilityVerdict out;
  out.exact = false;  // necessary condition only
  out.verdict = verdict_from_margin(ms.margin);
  out.margin_x = bc.kappa * ms.best.mi_u - need_x;
  out.margin_y = bc.kappa * ms.best.mi_v - need_y;
  if (out.verdict != Verdict::Infeasible) out.witness_pw = ms.best.p_w;
  return out;
}

FeasibilityVerdict tuncel_zero_distortion_feasible(const JointSource& src,
                                                   const BroadcastChannelSpec& bc,
                                                   const SolverConfig& cfg) {
  cfg.validate();
  if (!is_hamming(src.delta1) || !is_hamming(src.delta2))
    throw Error(ErrorCode::NotHamming, "zero-distortion criterion needs Hamming measures");

  // H(X|Y), H(Y|X) from the source pmf.
  double hxy = 0.0, hyx = 0.0;
  auto q_x = src.q_x();
  auto q_y = src.q_y();
  for (std::size_t x = 0; x < src.nx(); ++x)
    for (std::size_t y = 0; y < src.ny(); ++y) {
      double p = src.q_xy(x, y);
      if (p == 0.0) continue;
      hxy -= p * std::log2(p / q_y[y]);
      hyx -= p * std::log2(p / q_x[x]);
    }

  auto ms = best_margin(bc, hxy, hyx, cfg);
  FeasibilityVerdict out;
  out.exact = true;
  out.verdict = verdict_from_margin(ms.margin);
  out.margin_x = bc.kappa * ms.best.mi_u - hxy;
  out.margin_y = bc.kappa * ms.best.mi_v - hyx;
  if (out.verdict != Verdict::Infeasible) out.witness_pw = ms.best.p_w;
  return out;
}

namespace {

// Source requirement support function g(lambda) = min over feasible test
// channels of lambda I(X;V|Y) + (1-lambda) I(Y;V|X); memoized per call.
struct SourceFrontier {
  const JointSource* src;
  double d1, d2;
  SolverConfig cfg;
  std::map<double, double> cache;

  double g(double lambda) {
    auto it = cache.find(lambda);
    if (it != cache.end()) return it->second;
    ba::CmiTerm t1, t2;
    cr_terms(src->nx(), src->ny(), t1, t2);
    t1.weight = lambda;
    t2.weight = 1.0 - lambda;
    const std::size_t n_out = src->nxhat() * src->nyhat();
    std::vector<ba::ConstraintSpec> cons(2);
    cons[0].delta = Mat(src->nx() * src->ny(), n_out, 0.0);
    cons[1].delta = Mat(src->nx() * src->ny(), n_out, 0.0);
    cons[0].target = d1;
    cons[1].target = d2;
    for (std::size_t x = 0; x < src->nx(); ++x)
      for (std::size_t y = 0; y < src->ny(); ++y)
        for (std::size_t xh = 0; xh < src->nxhat(); ++xh)
          for (std::size_t yh = 0; yh < src->nyhat(); ++yh) {
            cons[0].delta(x * src->ny() + y, xh * src->nyhat() + yh) = src->delta1(x, xh);
            cons[1].delta(x * src->ny() + y, xh * src->nyhat() + yh) = src->delta2(y, yh);
          }
    auto res = ba::constrained_min(src->q_xy.a, n_out, {t1, t2}, cons,
                                   constrained_options(cfg));
    double v = lambda * res.term_bits[0] + (1.0 - lambda) * res.term_bits[1];
    cache.emplace(lambda, v);
    return v;
  }

  // Budget (B1,B2) lies in the requirement region iff h(lambda) =
  // lambda B1 + (1-lambda) B2 - g(lambda) >= 0 for all lambda; h is convex.
  double min_h(double b1, double b2) {
    auto h = [&](double lam) { return lam * b1 + (1.0 - lam) * b2 - g(lam); };
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 36; ++it) {
      double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
      if (h(m1) <= h(m2))
        hi = m2;
      else
        lo = m1;
    }
    return std::min({h(lo), h(0.5 * (lo + hi)), h(hi), h(0.0), h(1.0)});
  }
};

}  // namespace

FeasibilityVerdict jscc_cr_achievable(const JointSource& src,
                                      const BroadcastChannelSpec& bc, double d1,
                                      double d2, const SolverConfig& cfg) {
  cfg.validate();
  if (!(d1 >= 0.0) || !(d2 >= 0.0))
    throw Error(ErrorCode::DomainError, "distortions must be >= 0");

  SourceFrontier sf{&src, d1, d2, cfg, {}};
  const Mat ch_u = bc.channel_u(), ch_v = bc.channel_v();

  // Maximize the requirement margin along the channel frontier; concave in
  // the frontier point, so grid plus ternary refinement.
  auto score_of = [&](const FrontierPoint& p) {
    return sf.min_h(bc.kappa * p.mi_u, bc.kappa * p.mi_v);
  };

  const int grid = 33;
  double best_score = -kInf;
  FrontierPoint best;
  std::vector<double> warm;
  for (int i = 0; i < grid; ++i) {
    double lambda = static_cast<double>(i) / (grid - 1);
    auto p = frontier_point(ch_u, ch_v, lambda, cfg, warm.empty() ? nullptr : &warm);
    warm = p.p_w;
    double s = score_of(p);
    if (s > best_score) {
      best_score = s;
      best = p;
    }
  }
  double lo = std::max(0.0, best.lambda - 1.0 / (grid - 1));
  double hi = std::min(1.0, best.lambda + 1.0 / (grid - 1));
  for (int it = 0; it < 30; ++it) {
    double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
    auto p1 = frontier_point(ch_u, ch_v, m1, cfg, &best.p_w);
    auto p2 = frontier_point(ch_u, ch_v, m2, cfg, &best.p_w);
    double v1 = score_of(p1), v2 = score_of(p2);
    if (v1 > best_score) {
      best_score = v1;
      best = p1;
    }
    if (v2 > best_score) {
      best_score = v2;
      best = p2;
    }
    if (v1 <= v2)
      lo = m1;
    else
      hi = m2;
  }

  FeasibilityVerdict out;
  out.exact = true;
  out.verdict = verdict_from_margin(best_score);
  if (out.verdict == Verdict::Infeasible) {
    out.margin_x = out.margin_y = best_score;
    return out;
  }

  // Witness test channel: minimize max{I1 - kappa mi_u, I2 - kappa mi_v} at
  // the winning channel input law.
  double b1 = bc.kappa * best.mi_u, b2 = bc.kappa * best.mi_v;
  ba::CmiTerm t1, t2;
  cr_terms(src.nx(), src.ny(), t1, t2);
  const std::size_t n_out = src.nxhat() * src.nyhat();
  std::vector<ba::ConstraintSpec> cons(2);
  cons[0].delta = Mat(src.nx() * src.ny(), n_out, 0.0);
  cons[1].delta = Mat(src.nx() * src.ny(), n_out, 0.0);
  cons[0].target = d1;
  cons[1].target = d2;
  for (std::size_t x = 0; x < src.nx(); ++x)
    for (std::size_t y = 0; y < src.ny(); ++y)
      for (std::size_t xh = 0; xh < src.nxhat(); ++xh)
        for (std::size_t yh = 0; yh < src.nyhat(); ++yh) {
          cons[0].delta(x * src.ny() + y, xh * src.nyhat() + yh) = src.delta1(x, xh);
          cons[1].delta(x * src.ny() + y, xh * src.nyhat() + yh) = src.delta2(y, yh);
        }
  auto mm = ba::minimax_two_cmi(src.q_xy.a, n_out, t1, t2, cons, constrained_options(cfg),
                                b1, b2);
  out.witness_pw = best.p_w;
  Channel ch;
  ch.in_dims = {src.nx(), src.ny()};
  ch.out_dims = {src.nxhat(), src.nyhat()};
  ch.probs = mm.channel;
  out.witness_test_channel = std::move(ch);
  out.margin_x = b1 - mm.mi1_bits;
  out.margin_y = b2 - mm.mi2_bits;
  return out;
}

FeasibilityVerdict nayak_sufficient_check(const JointSource& src,
                                          const BroadcastChannelSpec& bc, double d1,
                                          double d2, const Channel& c_channel,
                                          const std::vector<int>& pi1,
                                          const std::vector<int>& pi2,
                                          const std::vector<double>& p_w,
                                          const SolverConfig& cfg) {
  cfg.validate();
  const std::size_t nx = src.nx(), ny = src.ny();
  if (c_channel.in_dims != std::vector<std::size_t>{nx, ny})
    throw Error(ErrorCode::ShapeMismatch, "description channel must map (x,y)");
  const std::size_t nc = c_channel.n_out();
  if (pi1.size() != nc * ny || pi2.size() != nc * nx)
    throw Error(ErrorCode::ShapeMismatch, "decoder table size mismatch");
  for (int v : pi1)
    if (v < 0 || static_cast<std::size_t>(v) >= src.nxhat())
      throw Error(ErrorCode::ShapeMismatch, "decoder 1 output out of range");
  for (int v : pi2)
    if (v < 0 || static_cast<std::size_t>(v) >= src.nyhat())
      throw Error(ErrorCode::ShapeMismatch, "decoder 2 output out of range");
  if (p_w.size() != bc.nw())
    throw Error(ErrorCode::ShapeMismatch, "channel input pmf size mismatch");
  auto pw = validate_pmf(p_w);

  // Condition (ii): distortions through the decoders.
  double dist1 = 0.0, dist2 = 0.0;
  Tensor3 joint(nx, ny, nc);
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < ny; ++y)
      for (std::size_t c = 0; c < nc; ++c) {
        double p = src.q_xy(x, y) * c_channel.probs(x * ny + y, c);
        joint(x, y, c) = p;
        dist1 += p * src.delta1(x, pi1[c * ny + y]);
        dist2 += p * src.delta2(y, pi2[c * nx + x]);
      }

  // Condition (iii): the two rate inequalities at the supplied input law.
  double i_xc_y = conditional_mutual_information_bits(joint, 1);
  double i_yc_x = conditional_mutual_information_bits(joint, 0);
  Mat ch_u = bc.channel_u(), ch_v = bc.channel_v();
  Mat ju(bc.nw(), ch_u.cols, 0.0), jv(bc.nw(), ch_v.cols, 0.0);
  for (std::size_t w = 0; w < bc.nw(); ++w) {
    for (std::size_t u = 0; u < ch_u.cols; ++u) ju(w, u) = pw[w] * ch_u(w, u);
    for (std::size_t v = 0; v < ch_v.cols; ++v) jv(w, v) = pw[w] * ch_v(w, v);
  }
  double mi_u = mutual_information_bits(ju);
  double mi_v = mutual_information_bits(jv);

  FeasibilityVerdict out;
  out.exact = true;  // sufficient: feasible certifies achievability
  out.margin_x = bc.kappa * mi_u - i_xc_y;
  out.margin_y = bc.kappa * mi_v - i_yc_x;
  double margin = std::min({out.margin_x, out.margin_y, d1 - dist1, d2 - dist2});
  out.verdict = verdict_from_margin(margin);
  if (out.verdict != Verdict::Infeasible) {
    out.witness_pw = pw;
    out.witness_test_channel = c_channel;
  }
  return out;
}

}  // namespace twrn
