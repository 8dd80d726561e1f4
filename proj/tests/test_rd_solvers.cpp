#include <doctest.h>

#include <cmath>

#include "instances.hpp"
#include "twrn/ba.hpp"
#include "twrn/closed_forms.hpp"
#include "twrn/rd_solvers.hpp"

using namespace twrn;

namespace {

const SolverConfig kCfg;

Mat hamming2() {
  Mat d(2, 2, 1.0);
  d(0, 0) = d(1, 1) = 0.0;
  return d;
}

}  // namespace

TEST_CASE("marginal RD on the uniform binary source") {
  std::vector<double> q{0.5, 0.5};
  auto r0 = marginal_rd(q, hamming2(), 0.0, kCfg);
  CHECK(r0.rate == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(r0.converged);

  auto rhalf = marginal_rd(q, hamming2(), 0.5, kCfg);
  CHECK(rhalf.rate == doctest::Approx(0.0).epsilon(1e-9));

  auto r = marginal_rd(q, hamming2(), 0.1, kCfg);
  CHECK(r.rate == doctest::Approx(0.5310044064107188).epsilon(1e-8));
  CHECK(r.achieved_distortions[0] <= 0.1 + 1e-9);
  CHECK(r.rate >= r.dual_value - 1e-9);
  CHECK(r.rate - r.dual_value <= 1e-6);

  CHECK_THROWS_AS(marginal_rd(q, hamming2(), -0.5, kCfg), Error);
}

TEST_CASE("marginal RD matches the binary closed form along a sweep") {
  std::vector<double> q{0.5, 0.5};
  for (double d = 0.02; d < 0.5; d += 0.06) {
    auto r = marginal_rd(q, hamming2(), d, kCfg);
    CHECK(r.rate == doctest::Approx(1.0 - binary_entropy(d)).epsilon(1e-7));
  }
}

TEST_CASE("conditional RD on the DSBS") {
  auto src = dsbs::make_source(0.25);
  auto r = conditional_rd(src, 1, 0.1, kCfg);
  CHECK(r.rate == doctest::Approx(0.3422825308698516).epsilon(1e-8));

  CHECK(conditional_rd(src, 1, 0.25, kCfg).rate == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(conditional_rd(src, 1, 1.0, kCfg).rate == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(conditional_rd(src, 2, 0.1, kCfg).rate ==
        doctest::Approx(0.3422825308698516).epsilon(1e-8));
}

TEST_CASE("conditional RD collapses to marginal under independence") {
  auto src = testing::independent_uniform_binary();
  auto c = conditional_rd(src, 1, 0.1, kCfg);
  CHECK(c.rate == doctest::Approx(0.5310044064107188).epsilon(1e-8));
}

TEST_CASE("joint RD worked examples") {
  auto dsbs_src = dsbs::make_source(0.25);
  auto lossless = joint_rd(dsbs_src, 0.0, 0.0, kCfg);
  CHECK(lossless.rate == doctest::Approx(1.8112781244591328).epsilon(1e-9));

  auto ind = testing::independent_uniform_binary();
  auto r = joint_rd(ind, 0.1, 0.1, kCfg);
  CHECK(r.rate == doctest::Approx(1.0620088128214376).epsilon(1e-7));
  CHECK(r.achieved_distortions[0] <= 0.1 + 1e-9);
  CHECK(r.achieved_distortions[1] <= 0.1 + 1e-9);
}

TEST_CASE("rd_curve sweeps") {
  auto src = dsbs::make_source(0.25);
  std::vector<double> grid{0.0, 0.05, 0.10, 0.15, 0.20, 0.25};
  auto curve = rd_curve(RdSolverId::ConditionalX, src, grid, kCfg);
  REQUIRE(curve.size() == grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(curve[i].first == grid[i]);
    CHECK(curve[i].second == doctest::Approx(dsbs::rd(0.25, grid[i])).epsilon(1e-7));
    if (i) CHECK(curve[i].second <= curve[i - 1].second + 2e-9);
  }

  CHECK(rd_curve(RdSolverId::MarginalX, src, {}, kCfg).empty());
  auto single = rd_curve(RdSolverId::MarginalX, src, {0.5}, kCfg);
  CHECK(single[0].second == doctest::Approx(0.0).epsilon(1e-9));

  CHECK_THROWS_AS(rd_curve(RdSolverId::MarginalX, src, {0.2, 0.1}, kCfg), Error);
}

TEST_CASE("solver invariants on random binary sources") {
  Rng rng(41);
  for (int trial = 0; trial < 8; ++trial) {
    auto src = testing::random_hamming_source(rng, 2, 2);
    double d = 0.02 + 0.2 * rng.next_double();
    auto cond = conditional_rd(src, 1, d, kCfg);
    auto marg = marginal_rd(src.q_x(), src.delta1, d, kCfg);
    CHECK(cond.rate <= marg.rate + 2.0 * kCfg.tol + 1e-9);

    auto joint = joint_rd(src, d, d, kCfg);
    auto cond2 = conditional_rd(src, 2, d, kCfg);
    CHECK(joint.rate >= std::max(cond.rate, cond2.rate) - 2.0 * kCfg.tol - 1e-9);
  }
}

TEST_CASE("rd curves are midpoint convex in d") {
  auto src = dsbs::make_source(0.3);
  for (double d = 0.02; d + 0.08 < 0.3; d += 0.04) {
    double a = conditional_rd(src, 1, d, kCfg).rate;
    double m = conditional_rd(src, 1, d + 0.04, kCfg).rate;
    double b = conditional_rd(src, 1, d + 0.08, kCfg).rate;
    CHECK(m <= 0.5 * (a + b) + 1e-8);
  }
}

TEST_CASE("BA objectives stayed monotone across this suite") {
  CHECK(ba::monotonicity_violations() == 0);
}
