#include "twrn/aux_solvers.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "twrn/ba.hpp"
#include "twrn/errors.hpp"
#include "twrn/parallel.hpp"
#include "twrn/rng.hpp"

namespace twrn {

namespace {

constexpr double kLn2 = 0.6931471805599453094172321;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct WzView {
  // Problem in canonical orientation: helper attaches to the first source.
  Mat q;        // q(x, y)
  Mat delta;    // |X| x |Xhat|
  std::size_t nx, ny, nxh, na;
};

struct WzState {
  Mat helper;               // p(a|x)
  std::vector<int> decoder; // (a, y) -> xhat
  double mi = 0.0;          // I(X;A|Y), nats
  double dist = 0.0;
  int iterations = 0;
  bool converged = false;
};

void decoder_update(const WzView& v, const Mat& helper, std::vector<int>& pi) {
  pi.assign(v.na * v.ny, 0);
  for (std::size_t a = 0; a < v.na; ++a)
    for (std::size_t y = 0; y < v.ny; ++y) {
      double best = kInf;
      int arg = 0;
      for (std::size_t xh = 0; xh < v.nxh; ++xh) {
        double e = 0.0;
        for (std::size_t x = 0; x < v.nx; ++x)
          e += v.q(x, y) * helper(x, a) * v.delta(x, xh);
        if (e < best - 1e-18) {
          best = e;
          arg = static_cast<int>(xh);
        }
      }
      pi[a * v.ny + y] = arg;
    }
}

// r(a|y), mean distortion profile dbar(x,a), I(X;A|Y) and E[delta].
void wz_eval(const WzView& v, const Mat& helper, const std::vector<int>& pi,
             Mat& r, Mat& dbar, double& mi, double& dist) {
  const auto q_y = col_marginal(v.q);
  const auto q_x = row_marginal(v.q);
  r = Mat(v.ny, v.na, 0.0);
  for (std::size_t x = 0; x < v.nx; ++x)
    for (std::size_t y = 0; y < v.ny; ++y) {
      if (v.q(x, y) == 0.0) continue;
      for (std::size_t a = 0; a < v.na; ++a) r(y, a) += v.q(x, y) * helper(x, a);
    }
  for (std::size_t y = 0; y < v.ny; ++y)
    if (q_y[y] > 0.0)
      for (std::size_t a = 0; a < v.na; ++a) r(y, a) /= q_y[y];

  dbar = Mat(v.nx, v.na, 0.0);
  for (std::size_t x = 0; x < v.nx; ++x) {
    if (q_x[x] == 0.0) continue;
    for (std::size_t a = 0; a < v.na; ++a) {
      double e = 0.0;
      for (std::size_t y = 0; y < v.ny; ++y) {
        if (v.q(x, y) == 0.0) continue;
        e += v.q(x, y) / q_x[x] * v.delta(x, pi[a * v.ny + y]);
      }
      dbar(x, a) = e;
    }
  }

  mi = 0.0;
  dist = 0.0;
  for (std::size_t x = 0; x < v.nx; ++x)
    for (std::size_t y = 0; y < v.ny; ++y) {
      double qxy = v.q(x, y);
      if (qxy == 0.0) continue;
      for (std::size_t a = 0; a < v.na; ++a) {
        double pa = helper(x, a);
        if (pa <= 0.0) continue;
        mi += qxy * pa * std::log(pa / r(y, a));
        dist += qxy * pa * v.delta(x, pi[a * v.ny + y]);
      }
    }
  if (mi < 0.0) mi = 0.0;
}

// One alternation pass at fixed slope (nats per distortion unit).
WzState wz_solve_at(const WzView& v, double slope, Mat init, double tol_nats,
                    int max_iters) {
  WzState st;
  st.helper = std::move(init);
  decoder_update(v, st.helper, st.decoder);

  const auto q_x = row_marginal(v.q);
  Mat r, dbar;
  std::vector<double> scores(v.na);
  double prev = kInf;
  int iter = 0;
  for (; iter < max_iters; ++iter) {
    decoder_update(v, st.helper, st.decoder);
    wz_eval(v, st.helper, st.decoder, r, dbar, st.mi, st.dist);
    double j = st.mi + slope * st.dist;
    if (prev - j < tol_nats && iter > 0) {
      st.converged = true;
      break;
    }
    prev = j;

    for (std::size_t x = 0; x < v.nx; ++x) {
      if (q_x[x] == 0.0) continue;
      double m = -kInf;
      for (std::size_t a = 0; a < v.na; ++a) {
        double s = -slope * dbar(x, a);
        bool dead = false;
        for (std::size_t y = 0; y < v.ny; ++y) {
          if (v.q(x, y) == 0.0) continue;
          double ra = r(y, a);
          if (ra <= 0.0) {
            dead = true;
            break;
          }
          s += v.q(x, y) / q_x[x] * std::log(ra);
        }
        scores[a] = dead ? -kInf : s;
        m = std::max(m, scores[a]);
      }
      double total = 0.0;
      for (std::size_t a = 0; a < v.na; ++a) {
        double e = scores[a] == -kInf ? 0.0 : std::exp(scores[a] - m);
        st.helper(x, a) = e;
        total += e;
      }
      for (std::size_t a = 0; a < v.na; ++a) st.helper(x, a) /= total;
    }
  }
  st.iterations = iter;
  return st;
}

struct WzCandidate {
  double rate_bits = kInf;
  Mat helper;
  std::vector<int> decoder;
  double dist = 0.0;
};

// Full slope search from one starting helper. Collects the best feasible
// candidate encountered (including the convex mix across the final bracket).
WzCandidate wz_search(const WzView& v, double d, Mat init, double tol_nats,
                      int max_iters, int* iters_acc, bool* mech_ok) {
  WzCandidate best;
  auto consider = [&](const WzState& st) {
    if (st.dist <= d + 1e-12 && st.mi / kLn2 < best.rate_bits) {
      best.rate_bits = std::max(st.mi, 0.0) / kLn2;
      best.helper = st.helper;
      best.decoder = st.decoder;
      best.dist = st.dist;
    }
  };

  WzState s0 = wz_solve_at(v, 0.0, init, tol_nats, max_iters);
  *iters_acc += s0.iterations;
  *mech_ok = *mech_ok && s0.converged;
  consider(s0);
  if (s0.dist <= d + 1e-12) return best;

  double lo = 0.0, hi = 1.0;
  WzState s_lo = s0, s_hi;
  while (true) {
    s_hi = wz_solve_at(v, hi, s_lo.helper, tol_nats, max_iters);
    *iters_acc += s_hi.iterations;
    consider(s_hi);
    if (s_hi.dist <= d) break;
    lo = hi;
    s_lo = s_hi;
    hi *= 8.0;
    if (hi > 1e16) break;
  }
  for (int it = 0; it < 48 && s_hi.dist <= d; ++it) {
    double mid = lo > 0.0 ? std::sqrt(lo * hi) : hi / 8.0;
    if (mid <= lo || mid >= hi) mid = 0.5 * (lo + hi);
    WzState sm = wz_solve_at(v, mid, s_hi.helper, tol_nats, max_iters);
    *iters_acc += sm.iterations;
    consider(sm);
    if (sm.dist <= d) {
      hi = mid;
      s_hi = sm;
    } else {
      lo = mid;
      s_lo = sm;
    }
  }

  // Mix across the bracket; distortion of the mix with a re-derived decoder
  // can only fall below the linear interpolation, so the mix is feasible.
  if (s_lo.dist > d && s_hi.dist <= d && s_lo.dist > s_hi.dist) {
    double theta = (d - s_hi.dist) / (s_lo.dist - s_hi.dist);
    theta = std::clamp(theta, 0.0, 1.0);
    Mat mix(v.nx, v.na, 0.0);
    for (std::size_t i = 0; i < mix.a.size(); ++i)
      mix.a[i] = theta * s_lo.helper.a[i] + (1.0 - theta) * s_hi.helper.a[i];
    WzState sm;
    sm.helper = std::move(mix);
    decoder_update(v, sm.helper, sm.decoder);
    Mat r, dbar;
    wz_eval(v, sm.helper, sm.decoder, r, dbar, sm.mi, sm.dist);
    consider(sm);
  }
  return best;
}

}  // namespace

WzResult wyner_ziv_rd(const JointSource& src, int which, double d, const SolverConfig& cfg) {
  cfg.validate();
  if (which != 1 && which != 2)
    throw Error(ErrorCode::DomainError, "which must be 1 or 2");
  if (!(d >= 0.0)) throw Error(ErrorCode::DomainError, "d must be >= 0");

  WzView v;
  if (which == 1) {
    v.q = src.q_xy;
    v.delta = src.delta1;
  } else {
    v.q = Mat(src.ny(), src.nx());
    for (std::size_t x = 0; x < src.nx(); ++x)
      for (std::size_t y = 0; y < src.ny(); ++y) v.q(y, x) = src.q_xy(x, y);
    v.delta = src.delta2;
  }
  v.nx = v.q.rows;
  v.ny = v.q.cols;
  v.nxh = v.delta.cols;
  v.na = v.nx + 1;

  const double tol_nats = std::clamp(cfg.tol * kLn2 * 1e-3, 1e-15, 1e-6);

  // Deterministic multi-start: seed 0 is the near-identity helper, the rest
  // are Dirichlet draws from the configured seed.
  std::vector<Mat> inits;
  {
    Mat ident(v.nx, v.na, 0.0);
    for (std::size_t x = 0; x < v.nx; ++x)
      for (std::size_t a = 0; a < v.na; ++a)
        ident(x, a) = (a == x) ? 1.0 - 1e-3 : 1e-3 / (v.na - 1);
    inits.push_back(std::move(ident));
    Rng rng(cfg.seed);
    for (int i = 1; i < cfg.n_starts; ++i) {
      Mat m(v.nx, v.na, 0.0);
      for (std::size_t x = 0; x < v.nx; ++x) {
        auto row = rng.next_pmf(v.na);
        std::copy(row.begin(), row.end(), m.row(x).begin());
      }
      inits.push_back(std::move(m));
    }
  }

  std::vector<WzCandidate> results(inits.size());
  std::vector<int> iter_counts(inits.size(), 0);
  std::vector<char> mech(inits.size(), 1);
  parallel_chunks(inits.size(), inits.size(), [&](std::size_t c, std::size_t b, std::size_t e) {
    (void)c;
    for (std::size_t i = b; i < e; ++i) {
      bool ok = true;
      int acc = 0;
      results[i] = wz_search(v, d, inits[i], tol_nats, cfg.max_iters, &acc, &ok);
      iter_counts[i] = acc;
      mech[i] = ok ? 1 : 0;
    }
  });

  WzResult out;
  out.n_a = v.na;
  out.n_starts_used = static_cast<int>(inits.size());
  std::size_t best_i = inits.size();
  for (std::size_t i = 0; i < results.size(); ++i) {
    out.iterations += iter_counts[i];
    if (results[i].rate_bits < (best_i == inits.size() ? kInf : results[best_i].rate_bits) - 1e-15)
      best_i = i;
  }
  if (best_i == inits.size())
    throw Error(ErrorCode::InfeasibleDistortion, "no feasible Wyner-Ziv operating point found");
  const auto& b = results[best_i];
  out.rate = b.rate_bits;
  out.helper_channel.in_dims = {v.nx};
  out.helper_channel.out_dims = {v.na};
  out.helper_channel.probs = b.helper;
  out.decoder = b.decoder;
  out.achieved_distortion = b.dist;
  out.best_start_seed = best_i;
  out.converged = mech[best_i] != 0;
  return out;
}

namespace {

double mi_of_input(const Mat& ch, const std::vector<double>& p) {
  Mat joint(ch.rows, ch.cols, 0.0);
  for (std::size_t w = 0; w < ch.rows; ++w)
    for (std::size_t z = 0; z < ch.cols; ++z) joint(w, z) = p[w] * ch(w, z);
  return mutual_information_bits(joint);
}

}  // namespace

CapacitySolve additive_capacity(std::size_t l, const std::vector<double>& delta,
                                double d, const std::vector<double>& noise,
                                const SolverConfig& cfg) {
  cfg.validate();
  if (delta.size() != l) throw Error(ErrorCode::ShapeMismatch, "delta size != l");
  if (noise.size() != l) throw Error(ErrorCode::ShapeMismatch, "noise size != l");
  if (!(d >= 0.0)) throw Error(ErrorCode::DomainError, "d must be >= 0");
  for (double v : delta)
    if (!(v >= 0.0) || !std::isfinite(v))
      throw Error(ErrorCode::DomainError, "delta entries must be finite and >= 0");
  auto pn = validate_pmf(noise);

  Mat ch(l, l, 0.0);
  for (std::size_t w = 0; w < l; ++w)
    for (std::size_t z = 0; z < l; ++z) ch(w, z) = pn[(z + l - w) % l];
  std::vector<Mat> chans{ch};
  std::vector<double> weights{1.0};

  const double tol_nats = std::clamp(cfg.tol * kLn2 * 1e-3, 1e-15, 1e-6);

  std::vector<char> mask;
  const std::vector<char>* mask_ptr = nullptr;
  if (d <= 0.0) {
    mask.assign(l, 0);
    for (std::size_t w = 0; w < l; ++w) mask[w] = delta[w] <= 0.0 ? 1 : 0;
    mask_ptr = &mask;
  }

  CapacitySolve out;
  double best_ub = kInf;
  int iters = 0;

  auto solve = [&](double slope, const std::vector<double>* warm) {
    auto r = ba::maximize_weighted_capacity(chans, weights, &delta, slope, mask_ptr,
                                            warm, tol_nats, cfg.max_iters);
    iters += r.iterations;
    best_ub = std::min(best_ub, (r.upper_bound_nats + slope * d) / kLn2);
    return r;
  };

  auto r0 = solve(0.0, nullptr);
  if (mask_ptr != nullptr || r0.cost_value <= d + 1e-12) {
    out.value = std::max(r0.value_nats, 0.0) / kLn2;
    out.input_pmf = std::move(r0.p_in);
    out.achieved_cost = r0.cost_value;
    out.upper_bound = best_ub;
    out.iterations = iters;
    out.converged = r0.converged;
    return out;
  }

  // Cost constraint active: bisect the slope, then mix for exact feasibility.
  double lo = 0.0, hi = 1.0;
  auto p_lo = r0.p_in;
  double c_lo = r0.cost_value;
  ba::CapacityResult r_hi;
  while (true) {
    r_hi = solve(hi, &p_lo);
    if (r_hi.cost_value <= d) break;
    lo = hi;
    p_lo = r_hi.p_in;
    c_lo = r_hi.cost_value;
    hi *= 8.0;
    if (hi > 1e15)
      throw Error(ErrorCode::InfeasibleDistortion, "input cost target unreachable");
  }
  auto p_hi = r_hi.p_in;
  double c_hi = r_hi.cost_value;
  bool mech = r0.converged && r_hi.converged;
  for (int it = 0; it < 48; ++it) {
    double mid = lo > 0.0 ? std::sqrt(lo * hi) : hi / 8.0;
    if (mid <= lo || mid >= hi) mid = 0.5 * (lo + hi);
    auto rm = solve(mid, &p_hi);
    if (rm.cost_value <= d) {
      hi = mid;
      p_hi = rm.p_in;
      c_hi = rm.cost_value;
    } else {
      lo = mid;
      p_lo = rm.p_in;
      c_lo = rm.cost_value;
    }
    mech = mech && rm.converged;
  }
  double theta = c_lo > c_hi ? (d - c_hi) / (c_lo - c_hi) : 0.0;
  theta = std::clamp(theta, 0.0, 1.0);
  std::vector<double> p_mix(l);
  for (std::size_t w = 0; w < l; ++w) p_mix[w] = theta * p_lo[w] + (1.0 - theta) * p_hi[w];

  double cost_mix = 0.0;
  for (std::size_t w = 0; w < l; ++w) cost_mix += p_mix[w] * delta[w];
  out.value = mi_of_input(ch, p_mix);
  out.input_pmf = std::move(p_mix);
  out.achieved_cost = cost_mix;
  out.upper_bound = best_ub;
  out.iterations = iters;
  out.converged = mech;
  return out;
}

namespace {

std::vector<double> project_simplex(std::vector<double> v) {
  std::vector<double> u = v;
  std::sort(u.begin(), u.end(), std::greater<double>());
  double css = 0.0, theta = 0.0;
  int rho = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    css += u[i];
    double t = (css - 1.0) / static_cast<double>(i + 1);
    if (u[i] - t > 0.0) {
      rho = static_cast<int>(i + 1);
      theta = t;
    }
  }
  (void)rho;
  for (auto& x : v) x = std::max(x - theta, 0.0);
  return v;
}

std::vector<double> project_feasible(std::vector<double> v, const std::vector<double>& delta,
                                     double d) {
  auto p = project_simplex(v);
  double c = std::inner_product(p.begin(), p.end(), delta.begin(), 0.0);
  if (c <= d + 1e-15) return p;
  double mu_lo = 0.0, mu_hi = 1.0;
  while (true) {
    auto q = v;
    for (std::size_t i = 0; i < q.size(); ++i) q[i] -= mu_hi * delta[i];
    auto pq = project_simplex(q);
    if (std::inner_product(pq.begin(), pq.end(), delta.begin(), 0.0) <= d) break;
    mu_hi *= 2.0;
    if (mu_hi > 1e12) return pq;
  }
  for (int it = 0; it < 60; ++it) {
    double mu = 0.5 * (mu_lo + mu_hi);
    auto q = v;
    for (std::size_t i = 0; i < q.size(); ++i) q[i] -= mu * delta[i];
    auto pq = project_simplex(q);
    if (std::inner_product(pq.begin(), pq.end(), delta.begin(), 0.0) <= d)
      mu_hi = mu;
    else
      mu_lo = mu;
  }
  auto q = v;
  for (std::size_t i = 0; i < q.size(); ++i) q[i] -= mu_hi * delta[i];
  return project_simplex(q);
}

// Enumerates compositions of k into m nonnegative parts.
void for_each_composition(int k, int m, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> c(m, 0);
  c[0] = k;
  while (true) {
    fn(c);
    // next composition in colex order
    int i = 0;
    while (i < m - 1 && c[i] == 0) ++i;
    if (i == m - 1) break;
    int val = c[i];
    c[i] = 0;
    c[0] = val - 1;
    c[i + 1] += 1;
  }
}

}  // namespace

MinimaxCapacitySolve minimax_capacity(std::size_t l, const std::vector<double>& delta,
                                      double d, const SolverConfig& cfg) {
  cfg.validate();
  if (delta.size() != l) throw Error(ErrorCode::ShapeMismatch, "delta size != l");
  if (!(d >= 0.0)) throw Error(ErrorCode::DomainError, "d must be >= 0");
  double dmin = *std::min_element(delta.begin(), delta.end());
  if (dmin > d)
    throw Error(ErrorCode::InfeasibleDistortion, "no admissible noise distribution");

  MinimaxCapacitySolve out;
  int iters = 0;
  auto eval = [&](const std::vector<double>& noise) {
    auto r = additive_capacity(l, delta, d, noise, cfg);
    iters += r.iterations;
    return r;
  };

  double best = kInf;
  std::vector<double> best_noise;
  CapacitySolve best_solve;
  auto consider = [&](const std::vector<double>& noise) {
    auto r = eval(noise);
    if (r.value < best) {
      best = r.value;
      best_noise = noise;
      best_solve = std::move(r);
    }
  };

  if (l == 2) {
    // One-dimensional convex problem: scan at step 0.01 then ternary refine.
    auto interval_cost = [&](double n) { return (1.0 - n) * delta[0] + n * delta[1]; };
    double n_lo = 0.0, n_hi = 1.0;
    if (interval_cost(0.0) > d || interval_cost(1.0) > d) {
      // shrink to the feasible segment of the line
      double a = delta[0], b = delta[1];
      if (a <= d && b > d)
        n_hi = (d - a) / (b - a);
      else if (b <= d && a > d)
        n_lo = (a - d) / (a - b);
    }
    int steps = static_cast<int>(std::floor((n_hi - n_lo) / 0.01)) + 1;
    for (int i = 0; i <= steps; ++i)
      consider({1.0 - std::min(n_lo + 0.01 * i, n_hi), std::min(n_lo + 0.01 * i, n_hi)});
    // ternary refine around the best grid point
    double a = std::max(n_lo, best_noise[1] - 0.01), b = std::min(n_hi, best_noise[1] + 0.01);
    for (int it = 0; it < 45; ++it) {
      double m1 = a + (b - a) / 3.0, m2 = b - (b - a) / 3.0;
      auto r1 = eval({1.0 - m1, m1});
      auto r2 = eval({1.0 - m2, m2});
      if (r1.value < best) {
        best = r1.value;
        best_noise = {1.0 - m1, m1};
        best_solve = r1;
      }
      if (r2.value < best) {
        best = r2.value;
        best_noise = {1.0 - m2, m2};
        best_solve = r2;
      }
      if (r1.value <= r2.value)
        b = m2;
      else
        a = m1;
    }
    out.residual = b - a;
  } else {
    // Simplex grid seeds, then projected subgradient polish from the best.
    const int k = 20;
    for_each_composition(k, static_cast<int>(l), [&](const std::vector<int>& comp) {
      std::vector<double> noise(l);
      double cost = 0.0;
      for (std::size_t i = 0; i < l; ++i) {
        noise[i] = static_cast<double>(comp[i]) / k;
        cost += noise[i] * delta[i];
      }
      if (cost <= d + 1e-12) consider(noise);
    });

    std::vector<double> noise = best_noise;
    double prev_best = best;
    for (int t = 1; t <= 400; ++t) {
      auto r = eval(noise);
      if (r.value < best) {
        best = r.value;
        best_noise = noise;
        best_solve = r;
      }
      // subgradient of C^add in the noise at the maximizing input
      std::vector<double> out_pmf(l, 0.0);
      for (std::size_t w = 0; w < l; ++w)
        for (std::size_t n = 0; n < l; ++n)
          out_pmf[(w + n) % l] += r.input_pmf[w] * noise[n];
      std::vector<double> g(l, 0.0);
      for (std::size_t n = 0; n < l; ++n) {
        double acc = 0.0;
        for (std::size_t w = 0; w < l; ++w) {
          double o = out_pmf[(w + n) % l];
          double ratio = (noise[n] > 0.0 && o > 0.0) ? std::log(noise[n] / o) : -50.0;
          acc += r.input_pmf[w] * ratio;
        }
        g[n] = std::clamp(acc, -50.0, 50.0);
      }
      double step = 0.05 / std::sqrt(static_cast<double>(t));
      for (std::size_t n = 0; n < l; ++n) noise[n] -= step * g[n];
      noise = project_feasible(std::move(noise), delta, d);
    }
    out.residual = std::max(prev_best - best, 0.0);
  }

  out.value = std::max(best, 0.0);
  out.worst_noise = best_noise;
  out.iterations = iters;
  out.converged = best_solve.converged;
  return out;
}

}  // namespace twrn
