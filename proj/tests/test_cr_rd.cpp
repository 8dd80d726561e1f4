#include <doctest.h>

#include <cmath>

#include "instances.hpp"
#include "twrn/bounds.hpp"
#include "twrn/closed_forms.hpp"
#include "twrn/cr_rd.hpp"
#include "twrn/prob.hpp"
#include "twrn/rd_solvers.hpp"

using namespace twrn;

namespace {
const SolverConfig kCfg;
}

TEST_CASE("cr_rd lossless endpoint equals the Sgarro value") {
  auto src = dsbs::make_source(0.25);
  auto res = cr_rd(src, 0.0, 0.0, kCfg);
  CHECK(res.rate == doctest::Approx(0.8112781244591328).epsilon(1e-7));

  Rng rng(61);
  for (int t = 0; t < 3; ++t) {
    auto s = testing::random_hamming_source(rng, 2, 2);
    double want = std::max(testing::cond_entropy_x_given_y(s),
                           testing::cond_entropy_y_given_x(s));
    auto r = cr_rd(s, 0.0, 0.0, kCfg);
    CHECK(r.rate == doctest::Approx(want).epsilon(1e-6));
  }
}

TEST_CASE("cr_rd matches the DSBS closed form below d*") {
  auto src = dsbs::make_source(0.25);
  for (double d : {0.02, 0.1, 0.14}) {
    auto res = cr_rd(src, d, d, kCfg);
    CHECK(res.rate == doctest::Approx(dsbs::rd(0.25, d)).epsilon(5e-6));
    CHECK(res.achieved_distortions[0] <= d + 1e-9);
    CHECK(res.achieved_distortions[1] <= d + 1e-9);
    CHECK(std::abs(std::max(res.mi_x, res.mi_y) - res.rate) <= kCfg.tol + 1e-9);
  }
}

TEST_CASE("cr_rd is strictly above the RD function past d*") {
  auto src = dsbs::make_source(0.25);
  for (double d : {0.2, 0.3, 0.4}) {
    auto res = cr_rd(src, d, d, kCfg);
    CHECK(res.rate > dsbs::rd(0.25, d) + 1e-3);
    CHECK(res.rate <= dsbs::cr_upper(0.25, d) + 1e-3);
  }
}

TEST_CASE("cr_rd identity: max of CMIs vs joint-minus-min identity") {
  auto src = dsbs::make_source(0.25);
  for (double d : {0.05, 0.2}) {
    auto res = cr_rd(src, d, d, kCfg);
    const Mat& p = res.channel.probs;
    // I(X,Y;V), I(X;V), I(Y;V) of the returned channel
    const std::size_t nv = p.cols;
    Mat jzv(4, nv), jxv(2, nv, 0.0), jyv(2, nv, 0.0);
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y)
        for (std::size_t v = 0; v < nv; ++v) {
          double pr = src.q_xy(x, y) * p(x * 2 + y, v);
          jzv(x * 2 + y, v) = pr;
          jxv(x, v) += pr;
          jyv(y, v) += pr;
        }
    double lhs = std::max(res.mi_x, res.mi_y);
    double rhs = mutual_information_bits(jzv) -
                 std::min(mutual_information_bits(jxv), mutual_information_bits(jyv));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("cr_rd_joint_upper worked examples") {
  auto ind = testing::independent_uniform_binary();
  CHECK(cr_rd_joint_upper(ind, 0.1, 0.1, kCfg) ==
        doctest::Approx(0.5310044064107188).epsilon(1e-7));

  auto src = dsbs::make_source(0.25);
  CHECK(cr_rd_joint_upper(src, 0.0, 0.0, kCfg) ==
        doctest::Approx(0.8112781244591328).epsilon(1e-7));
  CHECK(cr_rd_joint_upper(src, 1.0, 1.0, kCfg) == doctest::Approx(0.0).epsilon(1e-9));

  // dominates cr_rd
  auto res = cr_rd(src, 0.1, 0.1, kCfg);
  CHECK(cr_rd_joint_upper(src, 0.1, 0.1, kCfg) >= res.rate - 2.0 * kCfg.tol - 1e-9);
}

TEST_CASE("cr_rd_max_distortion") {
  auto src = dsbs::make_source(0.25);
  CHECK(cr_rd_max_distortion(src, 1.0, kCfg).rate == doctest::Approx(0.0).epsilon(1e-9));

  auto zero = cr_rd_max_distortion(src, 0.0, kCfg);
  CHECK(zero.rate == doctest::Approx(0.8112781244591328).epsilon(1e-7));

  auto a = cr_rd_max_distortion(src, 0.1, kCfg);
  auto b = cr_rd(src, 0.1, 0.5, kCfg);
  CHECK(a.rate == doctest::Approx(b.rate).epsilon(2e-6));
}

TEST_CASE("one lossless reconstruction corollary") {
  auto src = dsbs::make_source(0.25);
  for (double d2 : {0.02, 0.1}) {
    auto res = cr_rd(src, 0.0, d2, kCfg);
    double want = std::max(0.8112781244591328, conditional_rd(src, 2, d2, kCfg).rate);
    CHECK(res.rate == doctest::Approx(want).epsilon(1e-6));
  }
}

TEST_CASE("cr_rd diagonal sweep is monotone and midpoint convex") {
  auto src = dsbs::make_source(0.3);
  std::vector<double> ds{0.05, 0.1, 0.15, 0.2, 0.25, 0.3};
  std::vector<double> rates;
  for (double d : ds) rates.push_back(cr_rd(src, d, d, kCfg).rate);
  for (std::size_t i = 1; i < rates.size(); ++i) CHECK(rates[i] <= rates[i - 1] + 1e-7);
  for (std::size_t i = 1; i + 1 < rates.size(); ++i)
    CHECK(rates[i] <= 0.5 * (rates[i - 1] + rates[i + 1]) + 1e-6);
}

TEST_CASE("cr equality sweep flags the small-distortion region") {
  auto src = dsbs::make_source(0.25);
  SolverConfig cfg = kCfg;
  cfg.tol = 1e-7;  // detection threshold 5*tol
  auto rows = cr_equality_sweep(src, {{0.05, 0.05}, {0.3, 0.3}}, cfg);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].equality);
  CHECK(!rows[1].equality);
  CHECK(rows[1].gap_to_rl > 1e-3);
}
