#include "verify_suite.hpp"

#include <cmath>
#include <sstream>

#include "twrn/ba.hpp"
#include "twrn/bounds.hpp"
#include "twrn/closed_forms.hpp"
#include "twrn/cr_rd.hpp"
#include "twrn/csv.hpp"
#include "twrn/prob.hpp"
#include "twrn/rd_solvers.hpp"
#include "twrn/rng.hpp"

namespace twrn::cli {

namespace {

JointSource random_hamming(Rng& rng, std::size_t n) {
  auto p = rng.next_pmf(n * n);
  double total = 0.0;
  for (auto& v : p) {
    v = 0.01 / (n * n) + 0.99 * v;
    total += v;
  }
  JointSource s;
  s.q_xy = Mat(n, n);
  for (std::size_t i = 0; i < n * n; ++i) s.q_xy.a[i] = p[i] / total;
  s.delta1 = Mat(n, n, 1.0);
  s.delta2 = Mat(n, n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    s.delta1(i, i) = 0.0;
    s.delta2(i, i) = 0.0;
  }
  return validate_joint_source(std::move(s));
}

}  // namespace

int run_verify_suite(bool fast, const std::function<void(const std::string&)>& report) {
  int failures = 0;
  auto check = [&](const std::string& name, bool ok, const std::string& detail) {
    std::ostringstream line;
    line << (ok ? "[ok]   " : "[FAIL] ") << name;
    if (!detail.empty()) line << "  (" << detail << ")";
    report(line.str());
    if (!ok) ++failures;
  };

  ba::reset_monotonicity_counter();
  SolverConfig cfg;

  {
    // closed-form identity at d* across rho
    double worst = 0.0;
    for (int i = 1; i <= 20; ++i) {
      double rho = 0.5 * i / 21.0;
      double ds = dsbs::d_star(rho);
      double lhs = dsbs::rd(rho, ds);
      double rhs = dsbs::wyner_common_information(rho) - (1.0 - binary_entropy(ds));
      worst = std::max(worst, std::abs(lhs - rhs));
    }
    check("dsbs common-information identity", worst <= 1e-12,
          "max |lhs-rhs| = " + csv::format(worst));
  }

  {
    // chain rule I(X;V|Y) = I(XY;V) - I(Y;V)
    Rng rng(101);
    int n_trials = fast ? 100 : 1000;
    double worst = 0.0;
    for (int t = 0; t < n_trials; ++t) {
      std::size_t nx = 2 + rng.next_below(2), ny = 2 + rng.next_below(2);
      std::size_t nv = 2 + rng.next_below(3);
      auto q = rng.next_pmf(nx * ny);
      Mat ch(nx * ny, nv);
      for (std::size_t z = 0; z < nx * ny; ++z) {
        auto row = rng.next_pmf(nv);
        std::copy(row.begin(), row.end(), ch.row(z).begin());
      }
      Tensor3 tj(nx, ny, nv);
      Mat jzv(nx * ny, nv);
      Mat jyv(ny, nv, 0.0);
      for (std::size_t x = 0; x < nx; ++x)
        for (std::size_t y = 0; y < ny; ++y)
          for (std::size_t v = 0; v < nv; ++v) {
            double p = q[x * ny + y] * ch(x * ny + y, v);
            tj(x, y, v) = p;
            jzv(x * ny + y, v) = p;
            jyv(y, v) += p;
          }
      double lhs = conditional_mutual_information_bits(tj, 1);
      double rhs = mutual_information_bits(jzv) - mutual_information_bits(jyv);
      worst = std::max(worst, std::abs(lhs - rhs));
    }
    check("chain-rule identity", worst <= 1e-12, "max residual = " + csv::format(worst));
  }

  {
    // conditional mutual information convexity in the channel
    Rng rng(103);
    int n_trials = fast ? 100 : 1000;
    double worst = -1.0;
    for (int t = 0; t < n_trials; ++t) {
      auto pab = rng.next_pmf(4);
      auto make = [&]() {
        Mat ch(4, 3);
        for (std::size_t z = 0; z < 4; ++z) {
          auto row = rng.next_pmf(3);
          std::copy(row.begin(), row.end(), ch.row(z).begin());
        }
        return ch;
      };
      Mat c1 = make(), c2 = make();
      auto cmi = [&](const Mat& ch) {
        Tensor3 tj(2, 2, 3);
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 3; ++c) tj(a, b, c) = pab[a * 2 + b] * ch(a * 2 + b, c);
        return conditional_mutual_information_bits(tj, 1);
      };
      Mat mix(4, 3);
      for (std::size_t i = 0; i < mix.a.size(); ++i) mix.a[i] = 0.5 * (c1.a[i] + c2.a[i]);
      worst = std::max(worst, cmi(mix) - 0.5 * (cmi(c1) + cmi(c2)));
    }
    check("cmi channel convexity", worst <= 1e-12, "max violation = " + csv::format(worst));
  }

  {
    // DSBS golden values for the solvers
    auto src = dsbs::make_source(0.25);
    double worst = 0.0;
    for (double d : {0.02, 0.08, 0.14}) {
      worst = std::max(worst, std::abs(cr_rd(src, d, d, cfg).rate - dsbs::rd(0.25, d)));
      worst = std::max(worst,
                       std::abs(cut_set_lower(src, d, d, cfg) - dsbs::rd(0.25, d)));
    }
    check("dsbs solver golden values", worst <= 1e-4, "max error = " + csv::format(worst));
  }

  {
    // bound ladder ordering on random sources
    Rng rng(107);
    bool ok = true;
    int n = fast ? 2 : 5;
    std::string detail;
    for (int t = 0; t < n && ok; ++t) {
      auto src = random_hamming(rng, 2);
      double d1 = 0.05 + 0.2 * rng.next_double();
      double d2 = 0.05 + 0.2 * rng.next_double();
      auto b = bound_bundle(src, d1, d2, cfg);
      ok = b.ordering_ok;
      if (!ok) detail = "bundle at (" + csv::format(d1) + "," + csv::format(d2) + ")";
    }
    check("bound ladder ordering", ok, detail);
  }

  {
    // conditionally independent collapse: r_l = r_u on product sources
    Rng rng(109);
    bool ok = true;
    std::string detail;
    for (int t = 0; t < (fast ? 2 : 4) && ok; ++t) {
      auto px = rng.next_pmf(2);
      auto py = rng.next_pmf(2);
      Mat q(2, 2);
      for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) q(x, y) = px[x] * py[y];
      JointSource s;
      s.q_xy = q;
      s.delta1 = Mat(2, 2, 1.0);
      s.delta1(0, 0) = s.delta1(1, 1) = 0.0;
      s.delta2 = s.delta1;
      auto src = validate_joint_source(std::move(s));
      double d = 0.02 + 0.15 * rng.next_double();
      double rl = cut_set_lower(src, d, d, cfg);
      double ru = compress_linear_upper(src, d, d, cfg);
      if (std::abs(ru - rl) > 2e-3) {
        ok = false;
        detail = "gap " + csv::format(ru - rl);
      }
    }
    check("conditional independence collapse", ok, detail);
  }

  {
    // byte-identical repeat of a solve
    auto src = dsbs::make_source(0.25);
    auto a = cr_rd(src, 0.1, 0.1, cfg);
    auto b = cr_rd(src, 0.1, 0.1, cfg);
    bool same = a.rate == b.rate && a.channel.probs.a == b.channel.probs.a;
    check("deterministic repeat", same, "");
  }

  check("alternating objectives monotone", ba::monotonicity_violations() == 0,
        std::to_string(ba::monotonicity_violations()) + " violations");

  return failures;
}

}  // namespace twrn::cli
