#include "twrn/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "twrn/ba.hpp"
#include "twrn/cr_rd.hpp"
#include "twrn/errors.hpp"
#include "twrn/optim.hpp"
#include "twrn/prob.hpp"
#include "twrn/rd_solvers.hpp"
#include "twrn/rng.hpp"

namespace twrn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_nonnegative(double d, const char* what) {
  if (!(d >= 0.0)) throw Error(ErrorCode::DomainError, std::string(what) + " must be >= 0");
}

}  // namespace

double cut_set_lower(const JointSource& src, double d1, double d2, const SolverConfig& cfg) {
  require_nonnegative(d1, "d1");
  require_nonnegative(d2, "d2");
  double a = conditional_rd(src, 1, d1, cfg).rate;
  double b = conditional_rd(src, 2, d2, cfg).rate;
  return std::max(a, b);
}

double compress_linear_upper(const JointSource& src, double d1, double d2,
                             const SolverConfig& cfg) {
  require_nonnegative(d1, "d1");
  require_nonnegative(d2, "d2");
  double a = wyner_ziv_rd(src, 1, d1, cfg).rate;
  double b = wyner_ziv_rd(src, 2, d2, cfg).rate;
  return std::max(a, b);
}

// ---------------------------------------------------------------------------
// Single-description machinery shared by R_U* and R_U**.

namespace {

struct DescEval {
  double i1 = 0.0, i2 = 0.0;  // I(X;C|Y), I(Y;C|X) in bits
  double dist1 = 0.0, dist2 = 0.0;
  std::vector<int> pi1, pi2;
};

void derive_decoders(const JointSource& src, const Mat& p_c, std::vector<int>& pi1,
                     std::vector<int>& pi2) {
  const std::size_t nx = src.nx(), ny = src.ny(), nc = p_c.cols;
  pi1.assign(nc * ny, 0);
  pi2.assign(nc * nx, 0);
  for (std::size_t c = 0; c < nc; ++c) {
    for (std::size_t y = 0; y < ny; ++y) {
      double best = kInf;
      int arg = 0;
      for (std::size_t xh = 0; xh < src.nxhat(); ++xh) {
        double e = 0.0;
        for (std::size_t x = 0; x < nx; ++x)
          e += src.q_xy(x, y) * p_c(x * ny + y, c) * src.delta1(x, xh);
        if (e < best - 1e-18) {
          best = e;
          arg = static_cast<int>(xh);
        }
      }
      pi1[c * ny + y] = arg;
    }
    for (std::size_t x = 0; x < nx; ++x) {
      double best = kInf;
      int arg = 0;
      for (std::size_t yh = 0; yh < src.nyhat(); ++yh) {
        double e = 0.0;
        for (std::size_t y = 0; y < ny; ++y)
          e += src.q_xy(x, y) * p_c(x * ny + y, c) * src.delta2(y, yh);
        if (e < best - 1e-18) {
          best = e;
          arg = static_cast<int>(yh);
        }
      }
      pi2[c * nx + x] = arg;
    }
  }
}

DescEval evaluate_description(const JointSource& src, const Mat& p_c) {
  const std::size_t nx = src.nx(), ny = src.ny(), nc = p_c.cols;
  DescEval e;
  derive_decoders(src, p_c, e.pi1, e.pi2);
  Tensor3 joint(nx, ny, nc);
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < ny; ++y)
      for (std::size_t c = 0; c < nc; ++c) {
        double p = src.q_xy(x, y) * p_c(x * ny + y, c);
        joint(x, y, c) = p;
        e.dist1 += p * src.delta1(x, e.pi1[c * ny + y]);
        e.dist2 += p * src.delta2(y, e.pi2[c * nx + x]);
      }
  e.i1 = conditional_mutual_information_bits(joint, 1);
  e.i2 = conditional_mutual_information_bits(joint, 0);
  return e;
}

// Decoder-induced distortion tables on the (z, c) grid.
void decoder_costs(const JointSource& src, const std::vector<int>& pi1,
                   const std::vector<int>& pi2, std::size_t nc, Mat& c1, Mat& c2) {
  const std::size_t nx = src.nx(), ny = src.ny();
  c1 = Mat(nx * ny, nc, 0.0);
  c2 = Mat(nx * ny, nc, 0.0);
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < ny; ++y)
      for (std::size_t c = 0; c < nc; ++c) {
        c1(x * ny + y, c) = src.delta1(x, pi1[c * ny + y]);
        c2(x * ny + y, c) = src.delta2(y, pi2[c * nx + x]);
      }
}

struct DescCandidate {
  double value = kInf;
  Mat p;
  DescEval eval;
  int iterations = 0;
  bool mech = true;
};

// Alternation: decoder re-derivation against a weighted-CMI channel solve,
// with the weight annealed toward the larger term (soft max). A final exact
// minimax solve is run separately on the winning decoders.
DescCandidate alternate_description(const JointSource& src, double d1, double d2,
                                    std::size_t nc, Mat p0,
                                    const ba::ConstrainedOptions& opt, int rounds) {
  const std::size_t ny = src.ny();
  DescCandidate cand;
  Mat p = std::move(p0);
  ba::CmiTerm t1, t2;
  cr_terms(src.nx(), ny, t1, t2);

  double lambda = 0.5;
  double temp = 10.0;  // annealed toward a hard max
  for (int round = 0; round < rounds; ++round) {
    DescEval e = evaluate_description(src, p);
    Mat c1, c2;
    decoder_costs(src, e.pi1, e.pi2, nc, c1, c2);
    std::vector<ba::ConstraintSpec> cons(2);
    cons[0].delta = std::move(c1);
    cons[0].target = d1;
    cons[1].delta = std::move(c2);
    cons[1].target = d2;
    std::vector<ba::CmiTerm> terms{t1, t2};
    terms[0].weight = lambda;
    terms[1].weight = 1.0 - lambda;
    ba::ConstrainedResult res;
    try {
      res = ba::constrained_min(src.q_xy.a, nc, terms, cons, opt);
    } catch (const Error&) {
      break;  // decoders admit no feasible channel; keep what we have
    }
    cand.iterations += res.iterations;
    cand.mech = cand.mech && res.converged;
    p = res.channel;
    double i1 = res.term_bits[0], i2 = res.term_bits[1];
    double w = std::exp(temp * (i1 - i2));
    lambda = std::clamp(w / (1.0 + w), 1e-6, 1.0 - 1e-6);
    temp = std::min(temp * 3.0, 1000.0);
    double v = std::max(i1, i2);
    if (v > cand.value - 1e-11 && round > 1) break;
    if (v < cand.value) {
      cand.value = v;
      cand.p = p;
    }
  }
  if (cand.value == kInf) return cand;
  cand.eval = evaluate_description(src, cand.p);
  cand.value = std::max(cand.eval.i1, cand.eval.i2);
  return cand;
}

// Channel that routes each (x,y) to its zero-distortion reconstruction pair;
// feasible for every distortion target under normal measures. Needs
// nc >= nxhat * nyhat.
Mat reconstruction_seed(const JointSource& src, const Mat& pair_channel, std::size_t nc) {
  const std::size_t n_in = src.nx() * src.ny();
  Mat p(n_in, nc, 0.0);
  std::size_t pairs = std::min<std::size_t>(pair_channel.cols, nc);
  for (std::size_t z = 0; z < n_in; ++z) {
    double mass = 0.0;
    for (std::size_t v = 0; v < pairs; ++v) {
      p(z, v) = pair_channel(z, v);
      mass += p(z, v);
    }
    if (mass <= 0.0) {
      p(z, 0) = 1.0;
      continue;
    }
    for (std::size_t v = 0; v < nc; ++v) p(z, v) /= mass;
  }
  return p;
}

}  // namespace

DescriptionBound one_description_upper(const JointSource& src, double d1, double d2,
                                       const SolverConfig& cfg, std::size_t c_card,
                                       const WzResult* wz_hint1, const WzResult* wz_hint2) {
  cfg.validate();
  require_nonnegative(d1, "d1");
  require_nonnegative(d2, "d2");
  const std::size_t nx = src.nx(), ny = src.ny();
  const std::size_t nc = c_card ? c_card : nx * ny + 2;
  const std::size_t n_in = nx * ny;

  ba::ConstrainedOptions fast = constrained_options(cfg);
  fast.inner_tol_nats = std::max(fast.inner_tol_nats, 1e-11);
  fast.bisect_iters = 30;

  std::vector<Mat> seeds;
  {
    // Constant description.
    Mat c(n_in, nc, 0.0);
    for (std::size_t z = 0; z < n_in; ++z) c(z, 0) = 1.0;
    seeds.push_back(std::move(c));
  }
  {
    // Joint-RD reconstruction pair read off as the description.
    auto jr = joint_rd(src, d1, d2, cfg);
    if (src.nxhat() * src.nyhat() <= nc)
      seeds.push_back(reconstruction_seed(src, jr.channel.probs, nc));
  }
  if (nx == 2 && ny == 2 && nc >= 2) {
    // Compress the modulo-two sum, the linear-network play for binary pairs.
    double rho_z = src.q_xy(0, 1) + src.q_xy(1, 0);
    auto zr = marginal_rd({1.0 - rho_z, rho_z}, src.delta1, std::min(d1, d2), cfg);
    Mat p(n_in, nc, 0.0);
    for (std::size_t x = 0; x < 2; ++x)
      for (std::size_t y = 0; y < 2; ++y)
        for (std::size_t c = 0; c < 2; ++c)
          p(x * ny + y, c) = zr.channel.probs((x + y) % 2, c);
    seeds.push_back(std::move(p));
  }
  {
    Rng rng(cfg.seed ^ 0x5eedULL);
    int extra = std::max(2, cfg.n_starts / 4);
    for (int i = 0; i < extra; ++i) {
      Mat p(n_in, nc, 0.0);
      for (std::size_t z = 0; z < n_in; ++z) {
        auto row = rng.next_pmf(nc);
        std::copy(row.begin(), row.end(), p.row(z).begin());
      }
      seeds.push_back(std::move(p));
    }
  }

  DescCandidate best;
  int iters = 0;
  for (auto& seed : seeds) {
    auto cand = alternate_description(src, d1, d2, nc, std::move(seed), fast, 8);
    iters += cand.iterations;
    if (cand.value < best.value) best = std::move(cand);
  }
  if (best.value == kInf)
    throw Error(ErrorCode::InfeasibleDistortion, "no feasible description found");

  // Exact minimax polish on the winning decoders.
  {
    Mat c1, c2;
    decoder_costs(src, best.eval.pi1, best.eval.pi2, nc, c1, c2);
    std::vector<ba::ConstraintSpec> cons(2);
    cons[0].delta = std::move(c1);
    cons[0].target = d1;
    cons[1].delta = std::move(c2);
    cons[1].target = d2;
    ba::CmiTerm t1, t2;
    cr_terms(nx, ny, t1, t2);
    try {
      auto res = ba::minimax_two_cmi(src.q_xy.a, nc, t1, t2, cons, constrained_options(cfg));
      iters += res.iterations;
      DescEval e = evaluate_description(src, res.channel);
      double v = std::max(e.i1, e.i2);
      if (v < best.value && e.dist1 <= d1 + 1e-9 && e.dist2 <= d2 + 1e-9) {
        best.value = v;
        best.p = res.channel;
        best.eval = std::move(e);
      }
    } catch (const Error&) {
      // keep the alternation result
    }
  }

  DescriptionBound out;
  out.rate = std::max(best.value, 0.0);
  out.channel.in_dims = {nx, ny};
  out.channel.out_dims = {nc};
  out.channel.probs = best.p;
  out.n_c = nc;
  out.decoder1 = best.eval.pi1;
  out.decoder2 = best.eval.pi2;
  out.mi_x = best.eval.i1;
  out.mi_y = best.eval.i2;
  out.achieved = {best.eval.dist1, best.eval.dist2};
  out.iterations = iters;
  out.converged = best.mech;

  // Product of the two Wyner-Ziv solutions: its description C = (A,B) keeps
  // I(X;C|Y) = I(X;A|Y) and certifies R_U* <= R_U even when the alternation
  // lands higher. The support bound makes the value admissible although the
  // witness uses more letters.
  if (wz_hint1 && wz_hint2) {
    const std::size_t na = wz_hint1->n_a, nb = wz_hint2->n_a;
    Mat p(n_in, na * nb, 0.0);
    for (std::size_t x = 0; x < nx; ++x)
      for (std::size_t y = 0; y < ny; ++y)
        for (std::size_t a = 0; a < na; ++a)
          for (std::size_t b = 0; b < nb; ++b)
            p(x * ny + y, a * nb + b) =
                wz_hint1->helper_channel.probs(x, a) * wz_hint2->helper_channel.probs(y, b);
    DescEval e = evaluate_description(src, p);
    double v = std::max(e.i1, e.i2);
    if (v < out.rate && e.dist1 <= d1 + 1e-9 && e.dist2 <= d2 + 1e-9) {
      out.rate = std::max(v, 0.0);
      out.channel.out_dims = {na * nb};
      out.channel.probs = std::move(p);
      out.n_c = na * nb;
      out.decoder1 = e.pi1;
      out.decoder2 = e.pi2;
      out.mi_x = e.i1;
      out.mi_y = e.i2;
      out.achieved = {e.dist1, e.dist2};
    }
  }
  return out;
}

namespace {

// R_U** objective pieces for a fixed description channel.
struct HbEval {
  double value = kInf;
  double max_cmi = 0.0;
  double r1 = 0.0, r2 = 0.0;
  DescEval desc;
};

HbEval heegard_value(const JointSource& src, const Mat& p_c, double d1, double d2,
                     const SolverConfig& inner_cfg) {
  const std::size_t nx = src.nx(), ny = src.ny(), nc = p_c.cols;
  HbEval h;
  h.desc = evaluate_description(src, p_c);
  h.max_cmi = std::max(h.desc.i1, h.desc.i2);

  // Side information (C, Y) for X and (C, X) for Y.
  Mat q_xs(nx, nc * ny, 0.0);
  Mat q_ys(ny, nc * nx, 0.0);
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < ny; ++y)
      for (std::size_t c = 0; c < nc; ++c) {
        double p = src.q_xy(x, y) * p_c(x * ny + y, c);
        q_xs(x, c * ny + y) += p;
        q_ys(y, c * nx + x) += p;
      }
  h.r1 = conditional_rd_general(q_xs, src.delta1, d1, inner_cfg).rate;
  h.r2 = conditional_rd_general(q_ys, src.delta2, d2, inner_cfg).rate;
  h.value = h.max_cmi + h.r1 + h.r2;
  return h;
}

}  // namespace

DescriptionBound heegard_berger_upper(const JointSource& src, double d1, double d2,
                                      const SolverConfig& cfg, std::size_t c_card,
                                      const DescriptionBound* r_u_star_hint) {
  cfg.validate();
  require_nonnegative(d1, "d1");
  require_nonnegative(d2, "d2");
  const std::size_t nx = src.nx(), ny = src.ny();
  const std::size_t nc = c_card ? c_card : nx * ny + 2;
  const std::size_t n_in = nx * ny;

  SolverConfig inner_cfg = cfg;
  inner_cfg.tol = std::max(cfg.tol, 1e-10);

  Mat best_p;
  HbEval best;
  int evals = 0;
  auto consider = [&](const Mat& p) {
    HbEval h = heegard_value(src, p, d1, d2, inner_cfg);
    ++evals;
    if (h.value < best.value) {
      best = h;
      best_p = p;
    }
    return h.value;
  };

  {
    Mat c(n_in, nc, 0.0);
    for (std::size_t z = 0; z < n_in; ++z) c(z, 0) = 1.0;
    consider(c);  // constant C: R_{X|Y}(d1) + R_{Y|X}(d2)
  }
  if (r_u_star_hint && r_u_star_hint->channel.probs.cols == nc)
    consider(r_u_star_hint->channel.probs);
  {
    auto cr = cr_rd(src, d1, d2, cfg);
    if (src.nxhat() * src.nyhat() <= nc)
      consider(reconstruction_seed(src, cr.channel.probs, nc));
  }

  // Tiny deterministic grid seed for small problems (binary C letters).
  if (n_in <= 4 && nc >= 2) {
    const int k = 4;
    std::vector<int> idx(n_in, 0);
    const int per_row = k + 1;
    Mat p(n_in, nc, 0.0);
    std::size_t total = 1;
    for (std::size_t z = 0; z < n_in; ++z) total *= per_row;
    Mat best_grid;
    double best_grid_val = kInf;
    for (std::size_t t = 0; t < total; ++t) {
      std::size_t u = t;
      for (std::size_t z = 0; z < n_in; ++z) {
        int c0 = static_cast<int>(u % per_row);
        u /= per_row;
        p(z, 0) = static_cast<double>(c0) / k;
        p(z, 1) = 1.0 - p(z, 0);
        for (std::size_t c = 2; c < nc; ++c) p(z, c) = 0.0;
      }
      HbEval h = heegard_value(src, p, d1, d2, inner_cfg);
      ++evals;
      if (h.value < best_grid_val) {
        best_grid_val = h.value;
        best_grid = p;
      }
    }
    if (best_grid_val < best.value) {
      best.value = best_grid_val;
      best_p = best_grid;
      best = heegard_value(src, best_p, d1, d2, inner_cfg);
    }
  }

  // Local polish in logit space from the incumbent.
  {
    std::vector<double> x0(n_in * nc);
    for (std::size_t i = 0; i < x0.size(); ++i)
      x0[i] = std::log(std::max(best_p.a[i], 1e-6));
    auto objective = [&](const std::vector<double>& logits) {
      Mat p(n_in, nc, 0.0);
      for (std::size_t z = 0; z < n_in; ++z) {
        double m = -kInf;
        for (std::size_t c = 0; c < nc; ++c) m = std::max(m, logits[z * nc + c]);
        double total = 0.0;
        for (std::size_t c = 0; c < nc; ++c) {
          p(z, c) = std::exp(logits[z * nc + c] - m);
          total += p(z, c);
        }
        for (std::size_t c = 0; c < nc; ++c) p(z, c) /= total;
      }
      HbEval h = heegard_value(src, p, d1, d2, inner_cfg);
      ++evals;
      return h.value;
    };
    auto nm = nelder_mead(objective, x0, 0.7, 500);
    // Rebuild the channel from the winning logits and keep it if better.
    Mat p(n_in, nc, 0.0);
    for (std::size_t z = 0; z < n_in; ++z) {
      double m = -kInf;
      for (std::size_t c = 0; c < nc; ++c) m = std::max(m, nm.x[z * nc + c]);
      double total = 0.0;
      for (std::size_t c = 0; c < nc; ++c) {
        p(z, c) = std::exp(nm.x[z * nc + c] - m);
        total += p(z, c);
      }
      for (std::size_t c = 0; c < nc; ++c) p(z, c) /= total;
    }
    consider(p);
  }

  DescriptionBound out;
  out.rate = std::max(best.value, 0.0);
  out.channel.in_dims = {nx, ny};
  out.channel.out_dims = {nc};
  out.channel.probs = best_p;
  out.n_c = nc;
  out.decoder1 = best.desc.pi1;
  out.decoder2 = best.desc.pi2;
  out.mi_x = best.desc.i1;
  out.mi_y = best.desc.i2;
  out.inner_rate1 = best.r1;
  out.inner_rate2 = best.r2;
  out.achieved = {best.desc.dist1, best.desc.dist2};
  out.iterations = evals;
  out.converged = true;
  return out;
}

bool is_difference_measure(const Mat& delta, std::vector<double>* g_out) {
  if (delta.rows != delta.cols || delta.rows == 0) return false;
  const std::size_t l = delta.rows;
  std::vector<double> g(l);
  for (std::size_t j = 0; j < l; ++j) g[j] = delta(0, (l - j) % l);
  for (std::size_t x = 0; x < l; ++x)
    for (std::size_t xh = 0; xh < l; ++xh)
      if (std::abs(delta(x, xh) - g[(x + l - xh) % l]) > 1e-12) return false;
  if (g_out) *g_out = g;
  return true;
}

bool is_hamming(const Mat& delta) {
  if (delta.rows != delta.cols) return false;
  for (std::size_t i = 0; i < delta.rows; ++i)
    for (std::size_t j = 0; j < delta.cols; ++j) {
      double want = i == j ? 0.0 : 1.0;
      if (std::abs(delta(i, j) - want) > 1e-12) return false;
    }
  return true;
}

double minimax_gap(const JointSource& src, double d1, double d2, const SolverConfig& cfg) {
  require_nonnegative(d1, "d1");
  require_nonnegative(d2, "d2");
  std::vector<double> g1, g2;
  if (!is_difference_measure(src.delta1, &g1) || !is_difference_measure(src.delta2, &g2))
    throw Error(ErrorCode::NotDifferenceMeasure,
                "minimax gap needs difference distortion measures");
  double cx = minimax_capacity(src.nx(), g1, d1, cfg).value;
  double cy = minimax_capacity(src.ny(), g2, d2, cfg).value;
  return std::max(cx, cy);
}

// ---------------------------------------------------------------------------
// Appendix lower-bound candidate.

namespace {

struct AppendixEval {
  double objective = 0.0;  // I(X,Y;C) + max{I(X;A|C,Y), I(Y;B|C,X)}
  double res_ab = 0.0;
  double res_xyab = 0.0;
  double dist1 = 0.0, dist2 = 0.0;
};

AppendixEval appendix_eval(const JointSource& src, const Mat& p_abc, std::size_t na,
                           std::size_t nb, std::size_t nc) {
  const std::size_t nx = src.nx(), ny = src.ny();
  AppendixEval e;

  // I(X,Y;C)
  Mat joint_zc(nx * ny, nc, 0.0);
  // I(X;A|C,Y) over (x, (c,y), a); I(Y;B|C,X) over (y, (c,x), b)
  Tensor3 xa(nx, nc * ny, na), yb(ny, nc * nx, nb);
  // I(A;B|X,Y,C) over (a, (z,c), b); I(X,Y;A,B) over (z, (a,b))
  Tensor3 ab(na, nx * ny * nc, nb);
  Mat joint_zab(nx * ny, na * nb, 0.0);

  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < ny; ++y) {
      std::size_t z = x * ny + y;
      double qz = src.q_xy(x, y);
      if (qz == 0.0) continue;
      for (std::size_t a = 0; a < na; ++a)
        for (std::size_t b = 0; b < nb; ++b)
          for (std::size_t c = 0; c < nc; ++c) {
            double p = qz * p_abc(z, (a * nb + b) * nc + c);
            if (p == 0.0) continue;
            joint_zc(z, c) += p;
            xa(x, c * ny + y, a) += p;
            yb(y, c * nx + x, b) += p;
            ab(a, z * nc + c, b) += p;
            joint_zab(z, a * nb + b) += p;
          }
    }

  double i_xyc = mutual_information_bits(joint_zc);
  double i_xa = conditional_mutual_information_bits(xa, 1);
  double i_yb = conditional_mutual_information_bits(yb, 1);
  e.objective = i_xyc + std::max(i_xa, i_yb);
  e.res_ab = conditional_mutual_information_bits(ab, 1);
  e.res_xyab = mutual_information_bits(joint_zab);

  // Decoder distortions: pi1 on (a, c, y), pi2 on (b, c, x).
  for (std::size_t a = 0; a < na; ++a)
    for (std::size_t c = 0; c < nc; ++c) {
      for (std::size_t y = 0; y < ny; ++y) {
        double best = kInf;
        for (std::size_t xh = 0; xh < src.nxhat(); ++xh) {
          double v = 0.0;
          for (std::size_t x = 0; x < nx; ++x) {
            double mass = 0.0;
            for (std::size_t b = 0; b < nb; ++b)
              mass += src.q_xy(x, y) * p_abc(x * ny + y, (a * nb + b) * nc + c);
            v += mass * src.delta1(x, xh);
          }
          best = std::min(best, v);
        }
        e.dist1 += best;
      }
    }
  // pi2 distortion
  for (std::size_t b = 0; b < nb; ++b)
    for (std::size_t c = 0; c < nc; ++c)
      for (std::size_t x = 0; x < nx; ++x) {
        double best = kInf;
        for (std::size_t yh = 0; yh < src.nyhat(); ++yh) {
          double v = 0.0;
          for (std::size_t y = 0; y < ny; ++y) {
            double mass = 0.0;
            for (std::size_t a = 0; a < na; ++a)
              mass += src.q_xy(x, y) * p_abc(x * ny + y, (a * nb + b) * nc + c);
            v += mass * src.delta2(y, yh);
          }
          best = std::min(best, v);
        }
        e.dist2 += best;
      }
  return e;
}

}  // namespace

AppendixCandidate appendix_lower_candidate(const JointSource& src, double d1, double d2,
                                           AppendixCards cards, const SolverConfig& cfg) {
  cfg.validate();
  require_nonnegative(d1, "d1");
  require_nonnegative(d2, "d2");
  if (cards.a < 1 || cards.b < 1 || cards.c < 1)
    throw Error(ErrorCode::DomainError, "cardinalities must be >= 1");
  const std::size_t nx = src.nx(), ny = src.ny();
  const std::size_t n_in = nx * ny, n_out = cards.a * cards.b * cards.c;

  // Zero-distortion anchor: deterministic C map with constant A, B. Used to
  // restore exact feasibility by mixing.
  Mat anchor(n_in, n_out, 0.0);
  double anchor_d1 = kInf, anchor_d2 = kInf;
  {
    std::size_t n_maps = 1;
    for (std::size_t z = 0; z < n_in; ++z) n_maps *= cards.c;
    double best_score = kInf;
    std::vector<std::size_t> best_map(n_in, 0);
    for (std::size_t m = 0; m < n_maps; ++m) {
      std::size_t u = m;
      std::vector<std::size_t> cmap(n_in);
      for (std::size_t z = 0; z < n_in; ++z) {
        cmap[z] = u % cards.c;
        u /= cards.c;
      }
      Mat p(n_in, n_out, 0.0);
      for (std::size_t z = 0; z < n_in; ++z) p(z, cmap[z]) = 1.0;  // a = b = 0
      AppendixEval e = appendix_eval(src, p, cards.a, cards.b, cards.c);
      double score = std::max(e.dist1 - d1, e.dist2 - d2);
      if (score < best_score) {
        best_score = score;
        best_map = cmap;
        anchor_d1 = e.dist1;
        anchor_d2 = e.dist2;
      }
    }
    for (std::size_t z = 0; z < n_in; ++z) anchor(z, best_map[z]) = 1.0;
  }

  const std::vector<double> stage_weights{10.0, 100.0, 1000.0, 10000.0, 100000.0};
  const double dist_weight = 1e6;

  auto penalized = [&](const Mat& p, double w) {
    AppendixEval e = appendix_eval(src, p, cards.a, cards.b, cards.c);
    double pen = w * (e.res_ab * e.res_ab + e.res_xyab * e.res_xyab);
    double v1 = std::max(0.0, e.dist1 - d1), v2 = std::max(0.0, e.dist2 - d2);
    return e.objective + pen + dist_weight * (v1 * v1 + v2 * v2);
  };

  Rng rng(cfg.seed ^ 0xA11CEULL);
  int n_starts = std::min(cfg.n_starts, 6);
  Mat best_p;
  double best_val = kInf;
  int evals = 0;
  for (int s = 0; s < n_starts; ++s) {
    Mat p(n_in, n_out, 0.0);
    if (s == 0) {
      p = anchor;
      // soften the anchor so the search can move
      for (auto& v : p.a) v = 0.9 * v + 0.1 / n_out;
    } else {
      for (std::size_t z = 0; z < n_in; ++z) {
        auto row = rng.next_pmf(n_out);
        std::copy(row.begin(), row.end(), p.row(z).begin());
      }
    }
    std::vector<double> logits(n_in * n_out);
    for (std::size_t i = 0; i < logits.size(); ++i)
      logits[i] = std::log(std::max(p.a[i], 1e-6));
    for (double w : stage_weights) {
      auto objective = [&](const std::vector<double>& lg) {
        Mat q(n_in, n_out, 0.0);
        for (std::size_t z = 0; z < n_in; ++z) {
          double m = -kInf;
          for (std::size_t c = 0; c < n_out; ++c) m = std::max(m, lg[z * n_out + c]);
          double tot = 0.0;
          for (std::size_t c = 0; c < n_out; ++c) {
            q(z, c) = std::exp(lg[z * n_out + c] - m);
            tot += q(z, c);
          }
          for (std::size_t c = 0; c < n_out; ++c) q(z, c) /= tot;
        }
        ++evals;
        return penalized(q, w);
      };
      auto nm = nelder_mead(objective, logits, 0.5, 400);
      logits = nm.x;
    }
    Mat p_fin(n_in, n_out, 0.0);
    for (std::size_t z = 0; z < n_in; ++z) {
      double m = -kInf;
      for (std::size_t c = 0; c < n_out; ++c) m = std::max(m, logits[z * n_out + c]);
      double tot = 0.0;
      for (std::size_t c = 0; c < n_out; ++c) {
        p_fin(z, c) = std::exp(logits[z * n_out + c] - m);
        tot += p_fin(z, c);
      }
      for (std::size_t c = 0; c < n_out; ++c) p_fin(z, c) /= tot;
    }
    double v = penalized(p_fin, stage_weights.back());
    if (v < best_val) {
      best_val = v;
      best_p = p_fin;
    }
  }

  // Restore exact distortion feasibility by mixing toward the anchor.
  AppendixEval fin = appendix_eval(src, best_p, cards.a, cards.b, cards.c);
  if ((fin.dist1 > d1 || fin.dist2 > d2) && (anchor_d1 <= d1 && anchor_d2 <= d2)) {
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 40; ++it) {
      double t = 0.5 * (lo + hi);
      Mat mix(n_in, n_out, 0.0);
      for (std::size_t i = 0; i < mix.a.size(); ++i)
        mix.a[i] = (1.0 - t) * best_p.a[i] + t * anchor.a[i];
      AppendixEval e = appendix_eval(src, mix, cards.a, cards.b, cards.c);
      if (e.dist1 <= d1 && e.dist2 <= d2)
        hi = t;
      else
        lo = t;
    }
    Mat mix(n_in, n_out, 0.0);
    for (std::size_t i = 0; i < mix.a.size(); ++i)
      mix.a[i] = (1.0 - hi) * best_p.a[i] + hi * anchor.a[i];
    best_p = std::move(mix);
    fin = appendix_eval(src, best_p, cards.a, cards.b, cards.c);
  }

  AppendixCandidate out;
  out.value = fin.objective;
  out.residual_ab_given_xyc = fin.res_ab;
  out.residual_xy_ab = fin.res_xyab;
  out.penalty_weights = stage_weights;
  out.achieved = {fin.dist1, fin.dist2};
  out.iterations = evals;
  bool cards_ok = cards.c >= nx * ny + 5 && cards.a >= nx * ny * cards.c + 2 &&
                  cards.b >= nx * ny * cards.c + 2;
  out.valid = cards_ok && fin.res_ab < 1e-6 && fin.res_xyab < 1e-6 &&
              fin.dist1 <= d1 + 1e-9 && fin.dist2 <= d2 + 1e-9;
  return out;
}

BoundBundle bound_bundle(const JointSource& src, double d1, double d2,
                         const SolverConfig& cfg) {
  cfg.validate();
  BoundBundle b;
  b.d1 = d1;
  b.d2 = d2;

  auto c1 = conditional_rd(src, 1, d1, cfg);
  auto c2 = conditional_rd(src, 2, d2, cfg);
  b.r_l = std::max(c1.rate, c2.rate);
  b.certificates.push_back({"conditional_rd_x", c1.rate, c1.iterations, c1.converged});
  b.certificates.push_back({"conditional_rd_y", c2.rate, c2.iterations, c2.converged});

  auto w1 = wyner_ziv_rd(src, 1, d1, cfg);
  auto w2 = wyner_ziv_rd(src, 2, d2, cfg);
  b.r_u = std::max(w1.rate, w2.rate);
  b.certificates.push_back({"wyner_ziv_x", w1.rate, w1.iterations, w1.converged});
  b.certificates.push_back({"wyner_ziv_y", w2.rate, w2.iterations, w2.converged});

  auto star = one_description_upper(src, d1, d2, cfg, 0, &w1, &w2);
  b.r_u_star = star.rate;
  b.certificates.push_back({"one_description", star.rate, star.iterations, star.converged});

  auto dstar = heegard_berger_upper(src, d1, d2, cfg, 0, &star);
  b.r_u_dstar = dstar.rate;
  b.certificates.push_back({"heegard_berger", dstar.rate, dstar.iterations, dstar.converged});

  if (is_difference_measure(src.delta1) && is_difference_measure(src.delta2)) {
    b.c_gap = minimax_gap(src, d1, d2, cfg);
    b.certificates.push_back({"minimax_gap", *b.c_gap, 0, true});
  }

  const double slack = std::max(1e-6, 2.0 * cfg.tol);
  b.ordering_ok = b.r_l <= b.r_u_dstar + slack && b.r_u_dstar <= b.r_u_star + slack &&
                  b.r_u_star <= b.r_u + slack;
  return b;
}

}  // namespace twrn
