#include "twrn/ba.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <cmath>
#include <limits>

#include "twrn/errors.hpp"

namespace twrn::ba {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLn2 = 0.6931471805599453094172321;
constexpr double kMonoSlackNats = 1e-12;
constexpr double kTinyProb = 1e-300;

std::atomic<long> g_mono_violations{0};

inline bool allowed(const std::vector<char>* mask, std::size_t n_out, std::size_t z,
                    std::size_t v) {
  return mask == nullptr || (*mask)[z * n_out + v] != 0;
}

// Conditional output marginals per term: r_j(g, v) = p(v | group = g).
void refresh_marginals(const std::vector<double>& q, const Mat& p,
                       const std::vector<CmiTerm>& terms, std::vector<Mat>& r) {
  const std::size_t n_in = q.size(), n_out = p.cols;
  r.resize(terms.size());
  for (std::size_t j = 0; j < terms.size(); ++j) {
    const auto& t = terms[j];
    Mat& rj = r[j];
    rj = Mat(static_cast<std::size_t>(t.n_groups), n_out, 0.0);
    std::vector<double> mass(t.n_groups, 0.0);
    for (std::size_t z = 0; z < n_in; ++z) {
      if (q[z] == 0.0) continue;
      int g = t.group[z];
      mass[g] += q[z];
      for (std::size_t v = 0; v < n_out; ++v) rj(g, v) += q[z] * p(z, v);
    }
    for (int g = 0; g < t.n_groups; ++g) {
      if (mass[g] <= 0.0) continue;
      for (std::size_t v = 0; v < n_out; ++v) rj(g, v) /= mass[g];
    }
  }
}

// Objective sum_j w_j sum qp ln(p / r_j) + sum qp cost, all in nats, plus the
// per-term sums. Marginals must be consistent with p for the terms to equal
// the CMIs.
double eval_objective(const std::vector<double>& q, const Mat& p,
                      const std::vector<CmiTerm>& terms, const std::vector<Mat>& r,
                      const Mat* cost, std::vector<double>* term_nats,
                      double* cost_out) {
  const std::size_t n_in = q.size(), n_out = p.cols;
  std::vector<double> terms_acc(terms.size(), 0.0);
  double cost_acc = 0.0;
  for (std::size_t z = 0; z < n_in; ++z) {
    if (q[z] == 0.0) continue;
    for (std::size_t v = 0; v < n_out; ++v) {
      double pv = p(z, v);
      if (pv <= 0.0) continue;
      double w = q[z] * pv;
      for (std::size_t j = 0; j < terms.size(); ++j) {
        double rv = r[j](terms[j].group[z], v);
        terms_acc[j] += w * std::log(pv / rv);
      }
      if (cost) cost_acc += w * (*cost)(z, v);
    }
  }
  double total = cost_acc;
  for (std::size_t j = 0; j < terms.size(); ++j) {
    if (terms_acc[j] < 0.0) terms_acc[j] = 0.0;
    total += terms[j].weight * terms_acc[j];
  }
  if (term_nats) *term_nats = terms_acc;
  if (cost_out) *cost_out = cost_acc;
  return total;
}

// Convex cut on F(m) = sum_z q(z) (-ln Z_z(m)), Z_z = sum_v prod_j
// m_j(v|g)^w_j exp(-cost). Valid lower bound on the inner optimum for any
// reference point; evaluated at a slightly smoothed copy of the current
// marginals to keep the gradient finite.
double lower_bound_nats(const std::vector<double>& q, const std::vector<CmiTerm>& terms,
                        std::vector<Mat> r, const Mat* cost,
                        const std::vector<char>* mask, std::size_t n_out) {
  const std::size_t n_in = q.size();
  const double eta = 1e-12;
  for (auto& rj : r)
    for (auto& v : rj.a) v = (1.0 - eta) * v + eta / static_cast<double>(n_out);

  std::vector<Mat> grad(r.size());
  for (std::size_t j = 0; j < r.size(); ++j) grad[j] = Mat(r[j].rows, r[j].cols, 0.0);

  double phi = 0.0;
  std::vector<double> ell(n_out);
  for (std::size_t z = 0; z < n_in; ++z) {
    if (q[z] == 0.0) continue;
    double m = kNegInf;
    for (std::size_t v = 0; v < n_out; ++v) {
      if (!allowed(mask, n_out, z, v)) {
        ell[v] = kNegInf;
        continue;
      }
      double s = cost ? -(*cost)(z, v) : 0.0;
      for (std::size_t j = 0; j < terms.size(); ++j)
        s += terms[j].weight * std::log(r[j](terms[j].group[z], v));
      ell[v] = s;
      m = std::max(m, s);
    }
    if (m == kNegInf) return kNegInf;
    double zsum = 0.0;
    for (std::size_t v = 0; v < n_out; ++v)
      if (ell[v] != kNegInf) zsum += std::exp(ell[v] - m);
    double ln_z = m + std::log(zsum);
    phi += q[z] * (-ln_z);
    for (std::size_t v = 0; v < n_out; ++v) {
      if (ell[v] == kNegInf) continue;
      double post = std::exp(ell[v] - ln_z);  // e^ell / Z
      for (std::size_t j = 0; j < terms.size(); ++j) {
        int g = terms[j].group[z];
        grad[j](g, v) += -q[z] * post * terms[j].weight / r[j](g, v);
      }
    }
  }

  double bound = phi;
  for (std::size_t j = 0; j < terms.size(); ++j) {
    for (std::size_t g = 0; g < grad[j].rows; ++g) {
      double lin = 0.0, lo = kInf;
      for (std::size_t v = 0; v < n_out; ++v) {
        lin += grad[j](g, v) * r[j](g, v);
        lo = std::min(lo, grad[j](g, v));
      }
      bound += lo - lin;
    }
  }
  return bound;
}

}  // namespace

long monotonicity_violations() { return g_mono_violations.load(); }
void reset_monotonicity_counter() { g_mono_violations.store(0); }

InnerResult minimize_weighted_cmi(const InnerProblem& prob, const Mat* warm,
                                  double tol_nats, int max_iters) {
  const auto& q = *prob.q;
  const std::size_t n_in = q.size(), n_out = prob.n_out;
  const auto& terms = prob.terms;
  const Mat* cost = prob.cost;

  double wsum = 0.0;
  for (const auto& t : terms) wsum += t.weight;
  assert(std::abs(wsum - 1.0) < 1e-9);

  Mat p(n_in, n_out, 0.0);
  for (std::size_t z = 0; z < n_in; ++z) {
    double mass = 0.0;
    if (warm) {
      for (std::size_t v = 0; v < n_out; ++v)
        if (allowed(prob.mask, n_out, z, v)) {
          p(z, v) = std::max((*warm)(z, v), 0.0);
          mass += p(z, v);
        }
    }
    std::size_t n_allowed = 0;
    for (std::size_t v = 0; v < n_out; ++v)
      if (allowed(prob.mask, n_out, z, v)) ++n_allowed;
    if (n_allowed == 0) {
      if (q[z] > 0.0)
        throw Error(ErrorCode::InfeasibleDistortion,
                    "zero-distortion support is empty for an input of positive mass");
      continue;
    }
    // Blend toward uniform so a warm start cannot pin letters at exactly zero.
    double blend = (warm && mass > 0.0) ? 1e-9 : 1.0;
    for (std::size_t v = 0; v < n_out; ++v) {
      if (!allowed(prob.mask, n_out, z, v)) continue;
      double base = (warm && mass > 0.0) ? p(z, v) / mass : 0.0;
      p(z, v) = (1.0 - blend) * base + blend / static_cast<double>(n_allowed);
    }
  }

  std::vector<Mat> r;
  std::vector<double> scores(n_out);
  double prev = kInf;
  InnerResult out;
  int iter = 0;
  for (; iter < max_iters; ++iter) {
    refresh_marginals(q, p, terms, r);
    double f = eval_objective(q, p, terms, r, cost, nullptr, nullptr);
    if (f > prev + kMonoSlackNats) g_mono_violations.fetch_add(1);
    if (prev - f < tol_nats && iter > 0) {
      out.converged = true;
      prev = f;
      break;
    }
    prev = f;

    for (std::size_t z = 0; z < n_in; ++z) {
      if (q[z] == 0.0) continue;
      double m = kNegInf;
      for (std::size_t v = 0; v < n_out; ++v) {
        if (!allowed(prob.mask, n_out, z, v)) {
          scores[v] = kNegInf;
          continue;
        }
        double s = cost ? -(*cost)(z, v) : 0.0;
        bool dead = false;
        for (std::size_t j = 0; j < terms.size(); ++j) {
          if (terms[j].weight == 0.0) continue;
          double rv = r[j](terms[j].group[z], v);
          if (rv <= 0.0) {
            dead = true;
            break;
          }
          s += terms[j].weight * std::log(rv);
        }
        scores[v] = dead ? kNegInf : s;
        m = std::max(m, scores[v]);
      }
      double total = 0.0;
      for (std::size_t v = 0; v < n_out; ++v) {
        double e = scores[v] == kNegInf ? 0.0 : std::exp(scores[v] - m);
        p(z, v) = e;
        total += e;
      }
      for (std::size_t v = 0; v < n_out; ++v) p(z, v) /= total;
    }
  }

  refresh_marginals(q, p, terms, r);
  out.value_nats = eval_objective(q, p, terms, r, cost, &out.term_nats, &out.cost_nats);
  out.lower_bound_nats = lower_bound_nats(q, terms, r, cost, prob.mask, n_out);
  out.channel = std::move(p);
  out.iterations = iter;
  return out;
}

namespace {

struct EvalAt {
  double value_bits = 0.0;
  std::vector<double> term_bits;
  std::vector<double> achieved;
};

EvalAt evaluate_channel(const std::vector<double>& q, const Mat& p,
                        const std::vector<CmiTerm>& terms,
                        const std::vector<ConstraintSpec>& cons) {
  std::vector<Mat> r;
  refresh_marginals(q, p, terms, r);
  EvalAt e;
  std::vector<double> tn;
  eval_objective(q, p, terms, r, nullptr, &tn, nullptr);
  e.term_bits.resize(tn.size());
  double total = 0.0;
  for (std::size_t j = 0; j < tn.size(); ++j) {
    e.term_bits[j] = tn[j] / kLn2;
    total += terms[j].weight * e.term_bits[j];
  }
  e.value_bits = total;
  e.achieved.resize(cons.size(), 0.0);
  for (std::size_t k = 0; k < cons.size(); ++k) {
    double d = 0.0;
    for (std::size_t z = 0; z < q.size(); ++z) {
      if (q[z] == 0.0) continue;
      for (std::size_t v = 0; v < p.cols; ++v)
        d += q[z] * p(z, v) * cons[k].delta(z, v);
    }
    e.achieved[k] = d;
  }
  return e;
}

Mat mix_channels(const Mat& a, const Mat& b, double theta) {
  Mat m(a.rows, a.cols, 0.0);
  for (std::size_t i = 0; i < a.a.size(); ++i)
    m.a[i] = theta * a.a[i] + (1.0 - theta) * b.a[i];
  return m;
}

struct SlopeSolve {
  InnerResult inner;
  std::vector<double> achieved;  // all constraints
  double dual_bits = 0.0;
};

}  // namespace

ConstrainedResult constrained_min(const std::vector<double>& q, std::size_t n_out,
                                  std::vector<CmiTerm> terms,
                                  const std::vector<ConstraintSpec>& constraints,
                                  const ConstrainedOptions& opt) {
  const std::size_t n_in = q.size();
  if (constraints.size() > 2)
    throw Error(ErrorCode::DomainError, "at most two distortion constraints supported");

  // Zero targets become hard support restrictions; positive targets go to the
  // slope search.
  std::vector<char> mask(n_in * n_out, 1);
  bool have_mask = false;
  std::vector<int> active;
  for (std::size_t k = 0; k < constraints.size(); ++k) {
    if (constraints[k].target <= 0.0) {
      have_mask = true;
      for (std::size_t z = 0; z < n_in; ++z)
        for (std::size_t v = 0; v < n_out; ++v)
          if (constraints[k].delta(z, v) > 0.0) mask[z * n_out + v] = 0;
    } else {
      active.push_back(static_cast<int>(k));
    }
  }

  InnerProblem prob;
  prob.q = &q;
  prob.n_out = n_out;
  prob.terms = terms;
  prob.mask = have_mask ? &mask : nullptr;

  ConstrainedResult out;
  out.multipliers.assign(constraints.size(), 0.0);
  int total_iters = 0;
  double best_dual = -kInf;
  Mat warm;
  bool have_warm = false;

  // Solves the Lagrangian at the given slopes (nats per distortion unit).
  auto solve_at = [&](const std::vector<double>& s_nats) -> SlopeSolve {
    Mat cost(n_in, n_out, 0.0);
    bool any = false;
    for (std::size_t k = 0; k < constraints.size(); ++k) {
      if (s_nats[k] == 0.0) continue;
      any = true;
      for (std::size_t i = 0; i < cost.a.size(); ++i)
        cost.a[i] += s_nats[k] * constraints[k].delta.a[i];
    }
    prob.cost = any ? &cost : nullptr;
    SlopeSolve s;
    s.inner = minimize_weighted_cmi(prob, have_warm ? &warm : nullptr,
                                    opt.inner_tol_nats, opt.inner_max_iters);
    total_iters += s.inner.iterations;
    warm = s.inner.channel;
    have_warm = true;
    s.achieved.assign(constraints.size(), 0.0);
    for (std::size_t k = 0; k < constraints.size(); ++k) {
      double d = 0.0;
      for (std::size_t z = 0; z < n_in; ++z) {
        if (q[z] == 0.0) continue;
        for (std::size_t v = 0; v < n_out; ++v)
          d += q[z] * s.inner.channel(z, v) * constraints[k].delta(z, v);
      }
      s.achieved[k] = d;
    }
    double dual = s.inner.lower_bound_nats;
    for (std::size_t k = 0; k < constraints.size(); ++k)
      dual -= s_nats[k] * std::max(constraints[k].target, 0.0);
    s.dual_bits = dual / kLn2;
    best_dual = std::max(best_dual, s.dual_bits);
    return s;
  };

  auto finish = [&](const Mat& channel, bool mech_ok) {
    EvalAt e = evaluate_channel(q, channel, terms, constraints);
    out.channel = channel;
    out.value_bits = e.value_bits;
    out.term_bits = e.term_bits;
    out.achieved = e.achieved;
    out.dual_bits = best_dual;
    out.iterations = total_iters;
    out.converged = mech_ok;
    return out;
  };

  if (active.empty()) {
    std::vector<double> zeros(constraints.size(), 0.0);
    SlopeSolve s = solve_at(zeros);
    return finish(s.inner.channel, s.inner.converged);
  }

  // One active constraint: bisection over its slope; the other slope (if a
  // second constraint exists here it is a masked one already) stays zero.
  auto search_one = [&](int k, std::vector<double> base_s,
                        bool* mech) -> std::pair<Mat, SlopeSolve> {
    const double d = constraints[k].target;
    base_s[k] = 0.0;
    SlopeSolve s0 = solve_at(base_s);
    *mech = s0.inner.converged;
    if (s0.achieved[k] <= d + 1e-12) return {s0.inner.channel, s0};

    double lo = 0.0;
    Mat p_lo = s0.inner.channel;
    double c_lo = s0.achieved[k];
    double hi = 1.0;
    SlopeSolve s_hi;
    while (true) {
      base_s[k] = hi;
      s_hi = solve_at(base_s);
      *mech = *mech && s_hi.inner.converged;
      if (s_hi.achieved[k] <= d) break;
      lo = hi;
      p_lo = s_hi.inner.channel;
      c_lo = s_hi.achieved[k];
      hi *= 8.0;
      if (hi > opt.slope_cap)
        throw Error(ErrorCode::InfeasibleDistortion, "distortion target unreachable");
    }
    Mat p_hi = s_hi.inner.channel;
    double c_hi = s_hi.achieved[k];
    SlopeSolve s_last = s_hi;
    for (int it = 0; it < opt.bisect_iters; ++it) {
      double mid = lo > 0.0 ? std::sqrt(lo * hi) : hi / 8.0;
      if (mid <= lo || mid >= hi) mid = 0.5 * (lo + hi);
      base_s[k] = mid;
      SlopeSolve sm = solve_at(base_s);
      if (sm.achieved[k] <= d) {
        hi = mid;
        p_hi = sm.inner.channel;
        c_hi = sm.achieved[k];
        s_last = sm;
      } else {
        lo = mid;
        p_lo = sm.inner.channel;
        c_lo = sm.achieved[k];
      }
    }
    out.multipliers[k] = hi / kLn2;
    double theta = (c_lo > c_hi) ? (d - c_hi) / (c_lo - c_hi) : 0.0;
    theta = std::clamp(theta, 0.0, 1.0);
    s_last.achieved[k] = d;
    return {mix_channels(p_lo, p_hi, theta), s_last};
  };

  if (active.size() == 1) {
    bool mech = true;
    auto [channel, s] = search_one(active[0], std::vector<double>(constraints.size(), 0.0), &mech);
    return finish(channel, mech);
  }

  // Two active constraints: outer bisection on the first slope, the inner
  // search re-solving the second each time. Each inner result satisfies the
  // second constraint, so mixing the outer bracket endpoints preserves it
  // while hitting the first target exactly.
  const int ka = active[0], kb = active[1];
  const double da = constraints[ka].target;
  bool mech = true;
  auto inner_of = [&](double sa) {
    std::vector<double> base(constraints.size(), 0.0);
    base[ka] = sa;
    bool m = true;
    auto res = search_one(kb, base, &m);
    mech = mech && m;
    return res;
  };

  auto r0 = inner_of(0.0);
  EvalAt e0 = evaluate_channel(q, r0.first, terms, constraints);
  if (e0.achieved[ka] <= da + 1e-12) {
    out.multipliers[ka] = 0.0;
    return finish(r0.first, mech);
  }

  double lo = 0.0, hi = 1.0;
  Mat p_lo = r0.first;
  double c_lo = e0.achieved[ka];
  Mat p_hi;
  double c_hi = 0.0;
  while (true) {
    auto rh = inner_of(hi);
    EvalAt eh = evaluate_channel(q, rh.first, terms, constraints);
    if (eh.achieved[ka] <= da) {
      p_hi = rh.first;
      c_hi = eh.achieved[ka];
      break;
    }
    lo = hi;
    p_lo = rh.first;
    c_lo = eh.achieved[ka];
    hi *= 8.0;
    if (hi > opt.slope_cap)
      throw Error(ErrorCode::InfeasibleDistortion, "distortion target unreachable");
  }
  for (int it = 0; it < opt.bisect_iters; ++it) {
    double mid = lo > 0.0 ? std::sqrt(lo * hi) : hi / 8.0;
    if (mid <= lo || mid >= hi) mid = 0.5 * (lo + hi);
    auto rm = inner_of(mid);
    EvalAt em = evaluate_channel(q, rm.first, terms, constraints);
    if (em.achieved[ka] <= da) {
      hi = mid;
      p_hi = rm.first;
      c_hi = em.achieved[ka];
    } else {
      lo = mid;
      p_lo = rm.first;
      c_lo = em.achieved[ka];
    }
  }
  out.multipliers[ka] = hi / kLn2;
  double theta = (c_lo > c_hi) ? (da - c_hi) / (c_lo - c_hi) : 0.0;
  theta = std::clamp(theta, 0.0, 1.0);
  return finish(mix_channels(p_lo, p_hi, theta), mech);
}

namespace {

struct LambdaEval {
  double lambda = 0.0;
  ConstrainedResult res;
  double g_bits = 0.0;  // dual objective value at this lambda
};

}  // namespace

MinimaxResult minimax_two_cmi(const std::vector<double>& q, std::size_t n_out,
                              const CmiTerm& term1, const CmiTerm& term2,
                              const std::vector<ConstraintSpec>& constraints,
                              const ConstrainedOptions& opt, double shift1_bits,
                              double shift2_bits) {
  int total_iters = 0;
  auto eval_lambda = [&](double lam) {
    std::vector<CmiTerm> terms{term1, term2};
    terms[0].weight = lam;
    terms[1].weight = 1.0 - lam;
    LambdaEval e;
    e.lambda = lam;
    e.res = constrained_min(q, n_out, terms, constraints, opt);
    total_iters += e.res.iterations;
    e.g_bits = lam * (e.res.term_bits[0] - shift1_bits) +
               (1.0 - lam) * (e.res.term_bits[1] - shift2_bits);
    return e;
  };

  // Golden-section maximization of the concave dual g(lambda).
  const double gr = 0.6180339887498949;
  double a = 0.0, b = 1.0;
  LambdaEval ea = eval_lambda(a), eb = eval_lambda(b);
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  LambdaEval e1 = eval_lambda(x1), e2 = eval_lambda(x2);
  std::vector<LambdaEval> evals{ea, eb, e1, e2};
  for (int it = 0; it < opt.golden_iters; ++it) {
    if (e1.g_bits >= e2.g_bits) {
      b = x2;
      x2 = x1;
      e2 = e1;
      x1 = b - gr * (b - a);
      e1 = eval_lambda(x1);
      evals.push_back(e1);
    } else {
      a = x1;
      x1 = x2;
      e1 = e2;
      x2 = a + gr * (b - a);
      e2 = eval_lambda(x2);
      evals.push_back(e2);
    }
  }

  double dual = -std::numeric_limits<double>::infinity();
  for (const auto& e : evals)
    dual = std::max(dual, e.res.dual_bits - e.lambda * shift1_bits -
                              (1.0 - e.lambda) * shift2_bits);

  auto shifted_max = [&](const ConstrainedResult& r) {
    return std::max(r.term_bits[0] - shift1_bits, r.term_bits[1] - shift2_bits);
  };
  auto shifted_diff = [&](const ConstrainedResult& r) {
    return (r.term_bits[0] - shift1_bits) - (r.term_bits[1] - shift2_bits);
  };

  // Feasible candidates: every evaluated channel plus balanced mixes between
  // evaluations whose term gap changes sign.
  const LambdaEval* best = &evals[0];
  for (const auto& e : evals)
    if (shifted_max(e.res) < shifted_max(best->res)) best = &e;

  MinimaxResult out;
  out.channel = best->res.channel;
  double best_val = shifted_max(best->res);

  const LambdaEval* neg = nullptr;
  const LambdaEval* pos = nullptr;
  for (const auto& e : evals) {
    double d = shifted_diff(e.res);
    if (d >= 0.0 && (!pos || e.g_bits > pos->g_bits)) pos = &e;
    if (d <= 0.0 && (!neg || e.g_bits > neg->g_bits)) neg = &e;
  }
  if (pos && neg && pos != neg) {
    const Mat& pa = pos->res.channel;  // term1-heavy side
    const Mat& pb = neg->res.channel;
    double tlo = 0.0, thi = 1.0;
    std::vector<CmiTerm> half{term1, term2};
    half[0].weight = 0.5;
    half[1].weight = 0.5;
    Mat mix;
    for (int it = 0; it < 60; ++it) {
      double t = 0.5 * (tlo + thi);
      mix = mix_channels(pa, pb, t);
      EvalAt e = evaluate_channel(q, mix, half, constraints);
      double d = (e.term_bits[0] - shift1_bits) - (e.term_bits[1] - shift2_bits);
      if (d >= 0.0)
        thi = t;
      else
        tlo = t;
    }
    mix = mix_channels(pa, pb, 0.5 * (tlo + thi));
    EvalAt e = evaluate_channel(q, mix, half, constraints);
    double v = std::max(e.term_bits[0] - shift1_bits, e.term_bits[1] - shift2_bits);
    if (v < best_val) {
      best_val = v;
      out.channel = mix;
    }
  }

  std::vector<CmiTerm> half{term1, term2};
  half[0].weight = 0.5;
  half[1].weight = 0.5;
  EvalAt fin = evaluate_channel(q, out.channel, half, constraints);
  out.value_bits = std::max(fin.term_bits[0] - shift1_bits, fin.term_bits[1] - shift2_bits);
  out.mi1_bits = fin.term_bits[0];
  out.mi2_bits = fin.term_bits[1];
  out.achieved = fin.achieved;
  out.multipliers = best->res.multipliers;
  out.lambda = best->lambda;
  out.dual_bits = dual;
  out.iterations = total_iters;
  out.converged = best->res.converged && out.value_bits - dual < 1e-6;
  return out;
}

CapacityResult maximize_weighted_capacity(const std::vector<Mat>& channels,
                                          const std::vector<double>& weights,
                                          const std::vector<double>* cost,
                                          double cost_slope_nats,
                                          const std::vector<char>* input_mask,
                                          const std::vector<double>* warm,
                                          double tol_nats, int max_iters) {
  const std::size_t n_in = channels[0].rows;
  const std::size_t J = channels.size();

  auto in_ok = [&](std::size_t w) { return input_mask == nullptr || (*input_mask)[w] != 0; };

  std::vector<double> p(n_in, 0.0);
  std::size_t n_allowed = 0;
  for (std::size_t w = 0; w < n_in; ++w)
    if (in_ok(w)) ++n_allowed;
  if (n_allowed == 0)
    throw Error(ErrorCode::InfeasibleDistortion, "input constraint admits no symbol");
  for (std::size_t w = 0; w < n_in; ++w) {
    if (!in_ok(w)) continue;
    double base = warm ? std::max((*warm)[w], 0.0) : 1.0 / n_allowed;
    p[w] = base + 1e-9 / static_cast<double>(n_allowed);
  }
  {
    double t = 0.0;
    for (double v : p) t += v;
    for (auto& v : p) v /= t;
  }

  CapacityResult out;
  std::vector<std::vector<double>> outm(J);
  std::vector<double> dkl(n_in);
  double prev = -kInf;
  double best_ub = kInf;
  int iter = 0;
  for (; iter < max_iters; ++iter) {
    // Output marginals and per-input relative entropies.
    double f = 0.0;
    double ub = -kInf;
    for (std::size_t w = 0; w < n_in; ++w) dkl[w] = 0.0;
    for (std::size_t j = 0; j < J; ++j) {
      const Mat& ch = channels[j];
      auto& om = outm[j];
      om.assign(ch.cols, 0.0);
      for (std::size_t w = 0; w < n_in; ++w) {
        if (p[w] == 0.0) continue;
        for (std::size_t v = 0; v < ch.cols; ++v) om[v] += p[w] * ch(w, v);
      }
      for (std::size_t w = 0; w < n_in; ++w) {
        if (!in_ok(w)) continue;
        double d = 0.0;
        for (std::size_t v = 0; v < ch.cols; ++v) {
          double t = ch(w, v);
          if (t > 0.0) d += t * std::log(t / om[v]);
        }
        dkl[w] += weights[j] * d;
      }
    }
    double cost_acc = 0.0;
    for (std::size_t w = 0; w < n_in; ++w) {
      if (!in_ok(w)) continue;
      double score = dkl[w] - (cost ? cost_slope_nats * (*cost)[w] : 0.0);
      ub = std::max(ub, score);
      if (p[w] > 0.0) {
        f += p[w] * dkl[w];
        if (cost) cost_acc += p[w] * (*cost)[w];
      }
    }
    f -= cost_slope_nats * cost_acc;
    best_ub = std::min(best_ub, ub);
    if (f < prev - kMonoSlackNats) g_mono_violations.fetch_add(1);
    if (iter > 0 && f - prev < tol_nats) {
      out.converged = true;
      prev = f;
      break;
    }
    prev = f;

    double m = -kInf;
    for (std::size_t w = 0; w < n_in; ++w)
      if (in_ok(w) && p[w] > 0.0)
        m = std::max(m, std::log(p[w]) + dkl[w] - (cost ? cost_slope_nats * (*cost)[w] : 0.0));
    double total = 0.0;
    for (std::size_t w = 0; w < n_in; ++w) {
      if (!in_ok(w) || p[w] == 0.0) {
        p[w] = 0.0;
        continue;
      }
      double s = std::log(p[w]) + dkl[w] - (cost ? cost_slope_nats * (*cost)[w] : 0.0);
      p[w] = std::exp(s - m);
      total += p[w];
    }
    for (std::size_t w = 0; w < n_in; ++w) {
      p[w] /= total;
      if (in_ok(w) && p[w] > 0.0 && p[w] < kTinyProb) p[w] = kTinyProb;
    }
  }

  // Final consistent evaluation.
  double value = 0.0, cost_acc = 0.0;
  out.term_nats.assign(J, 0.0);
  for (std::size_t j = 0; j < J; ++j) {
    const Mat& ch = channels[j];
    auto& om = outm[j];
    om.assign(ch.cols, 0.0);
    for (std::size_t w = 0; w < n_in; ++w)
      for (std::size_t v = 0; v < ch.cols; ++v) om[v] += p[w] * ch(w, v);
    double ij = 0.0;
    for (std::size_t w = 0; w < n_in; ++w) {
      if (p[w] == 0.0) continue;
      for (std::size_t v = 0; v < ch.cols; ++v) {
        double t = ch(w, v);
        if (t > 0.0) ij += p[w] * t * std::log(t / om[v]);
      }
    }
    out.term_nats[j] = std::max(ij, 0.0);
    value += weights[j] * out.term_nats[j];
  }
  if (cost) {
    for (std::size_t w = 0; w < n_in; ++w) cost_acc += p[w] * (*cost)[w];
    value -= cost_slope_nats * cost_acc;
  }
  out.p_in = std::move(p);
  out.value_nats = value;
  out.cost_value = cost_acc;
  out.upper_bound_nats = best_ub;
  out.iterations = iter;
  return out;
}

}  // namespace twrn::ba
