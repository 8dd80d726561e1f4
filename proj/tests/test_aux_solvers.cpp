#include <doctest.h>

#include <cmath>

#include "instances.hpp"
#include "twrn/aux_solvers.hpp"
#include "twrn/closed_forms.hpp"
#include "twrn/rd_solvers.hpp"

using namespace twrn;

namespace {
const SolverConfig kCfg;
}

TEST_CASE("wyner-ziv at zero distortion recovers H(X|Y)") {
  auto src = dsbs::make_source(0.25);
  auto wz = wyner_ziv_rd(src, 1, 0.0, kCfg);
  CHECK(wz.rate == doctest::Approx(0.8112781244591328).epsilon(1e-6));
  CHECK(wz.achieved_distortion <= 1e-9);
  CHECK(wz.n_a == 3);
}

TEST_CASE("wyner-ziv deterministic-function source at zero distortion") {
  // X in {0,1,2,3}, U = X mod 2, Y a noisy binary observation of U.
  Mat q(4, 2, 0.0);
  double eps = 0.2;
  for (int x = 0; x < 4; ++x) {
    int u = x % 2;
    q(x, u) = 0.25 * (1.0 - eps);
    q(x, 1 - u) = 0.25 * eps;
  }
  std::vector<int> psi_x{0, 1, 0, 1};
  std::vector<int> psi_y{0, 1};
  auto src = testing::deterministic_function_source(q, psi_x, 2, psi_y, 2);

  // H(U|Y) by hand: joint of (U, Y)
  Mat ju(2, 2, 0.0);
  for (int x = 0; x < 4; ++x)
    for (int y = 0; y < 2; ++y) ju(x % 2, y) += q(x, y);
  double h_u_given_y = 0.0;
  auto qy = col_marginal(ju);
  for (int u = 0; u < 2; ++u)
    for (int y = 0; y < 2; ++y)
      if (ju(u, y) > 0) h_u_given_y -= ju(u, y) * std::log2(ju(u, y) / qy[y]);

  auto wz = wyner_ziv_rd(src, 1, 0.0, kCfg);
  CHECK(wz.rate == doctest::Approx(h_u_given_y).epsilon(1e-5));
}

TEST_CASE("wyner-ziv on the DSBS sits between the conditional and marginal RD") {
  auto src = dsbs::make_source(0.25);
  auto wz = wyner_ziv_rd(src, 1, 0.1, kCfg);
  CHECK(wz.rate >= 0.3422825308698516 - 2e-6);
  CHECK(wz.rate <= 0.5310044064107188 + 1e-6);
  CHECK(wz.achieved_distortion <= 0.1 + 1e-9);
}

TEST_CASE("wyner-ziv never beats the conditional RD") {
  Rng rng(53);
  for (int t = 0; t < 4; ++t) {
    auto src = testing::random_hamming_source(rng, 2, 2);
    double d = 0.02 + 0.25 * rng.next_double();
    auto wz = wyner_ziv_rd(src, 1, d, kCfg);
    auto cond = conditional_rd(src, 1, d, kCfg);
    CHECK(wz.rate >= cond.rate - 2.0 * kCfg.tol - 1e-9);
  }
}

TEST_CASE("additive capacity worked examples") {
  std::vector<double> hamming{0.0, 1.0};

  auto zero = additive_capacity(2, hamming, 0.0, {0.75, 0.25}, kCfg);
  CHECK(zero.value == doctest::Approx(0.0).epsilon(1e-9));

  auto unif = additive_capacity(2, hamming, 0.4, {0.5, 0.5}, kCfg);
  CHECK(unif.value == doctest::Approx(0.0).epsilon(1e-9));

  auto c = additive_capacity(2, hamming, 0.25, {0.75, 0.25}, kCfg);
  CHECK(c.value == doctest::Approx(0.1431558784658322).epsilon(1e-7));
  CHECK(c.achieved_cost <= 0.25 + 1e-9);
  CHECK(c.upper_bound >= c.value - 1e-9);
  CHECK(c.upper_bound - c.value <= 1e-5);
}

TEST_CASE("minimax capacity on the binary Hamming alphabet") {
  std::vector<double> hamming{0.0, 1.0};

  CHECK(minimax_capacity(2, hamming, 0.0, kCfg).value == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(minimax_capacity(2, hamming, 0.5, kCfg).value == doctest::Approx(0.0).epsilon(1e-7));

  auto m = minimax_capacity(2, hamming, 0.25, kCfg);
  CHECK(m.value <= 0.1431558784658322 + 1e-6);
  CHECK(m.value == doctest::Approx(0.1431558784658322).epsilon(1e-4));
  CHECK(m.worst_noise[1] == doctest::Approx(0.25).epsilon(1e-3));
  CHECK(m.value >= 0.0);
  CHECK(m.value <= 1.0);
}

TEST_CASE("minimax capacity on a ternary alphabet stays within range") {
  std::vector<double> hamming3{0.0, 1.0, 1.0};
  auto m = minimax_capacity(3, hamming3, 0.3, kCfg);
  CHECK(m.value >= 0.0);
  CHECK(m.value <= std::log2(3.0));
  // witnessed upper bound: the grid already contains the reported noise
  auto c = additive_capacity(3, hamming3, 0.3, m.worst_noise, kCfg);
  CHECK(m.value == doctest::Approx(c.value).epsilon(1e-6));
}
