#include <doctest.h>

#include <cmath>

#include "instances.hpp"
#include "twrn/closed_forms.hpp"
#include "twrn/prob.hpp"

using namespace twrn;

TEST_CASE("dsbs rd closed form") {
  CHECK(dsbs::rd(0.25, 0.1) == doctest::Approx(0.3422825308698516).epsilon(1e-12));
  CHECK(dsbs::rd(0.25, 0.3) == 0.0);
  CHECK(dsbs::rd(0.25, 0.25) == 0.0);
  CHECK_THROWS_AS(dsbs::rd(0.25, 1.5), Error);
  CHECK_THROWS_AS(dsbs::rd(0.75, 0.1), Error);
}

TEST_CASE("dsbs d*") {
  CHECK(dsbs::d_star(0.0) == doctest::Approx(0.0));
  CHECK(dsbs::d_star(0.5) == doctest::Approx(0.5));
  CHECK(dsbs::d_star(0.25) == doctest::Approx(0.1464466094067262).epsilon(1e-12));
  for (int i = 0; i <= 50; ++i) {
    double rho = 0.5 * i / 50.0;
    double ds = dsbs::d_star(rho);
    CHECK(binary_convolution(ds, ds) == doctest::Approx(rho).epsilon(1e-12));
  }
}

TEST_CASE("dsbs cr upper bound values") {
  CHECK(dsbs::cr_upper(0.25, 0.5) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(dsbs::cr_upper(0.25, 0.3) == doctest::Approx(0.043458188617167).epsilon(1e-9));
  CHECK_THROWS_AS(dsbs::cr_upper(0.25, 0.1), Error);  // below d*

  // continuity toward d*: the bound approaches K - R_X(d*)
  double rho = 0.25, ds = dsbs::d_star(rho);
  double lim = dsbs::wyner_common_information(rho) - (1.0 - binary_entropy(ds));
  CHECK(dsbs::cr_upper(rho, ds + 1e-9) >= lim - 1e-6);
}

TEST_CASE("dsbs wyner common information") {
  CHECK(dsbs::wyner_common_information(0.0) == doctest::Approx(1.0));
  CHECK(dsbs::wyner_common_information(0.5) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(dsbs::wyner_common_information(0.25) ==
        doctest::Approx(0.6095260510734206).epsilon(1e-12));
}

TEST_CASE("part (ii) identity: R(d*) = K - R_X(d*)") {
  for (int i = 1; i <= 20; ++i) {
    double rho = 0.5 * i / 21.0;
    double ds = dsbs::d_star(rho);
    double lhs = dsbs::rd(rho, ds);
    double rhs = dsbs::wyner_common_information(rho) - (1.0 - binary_entropy(ds));
    CHECK(std::abs(lhs - rhs) <= 1e-12);
  }
}

TEST_CASE("cascade channel reproduces the diagonal rate") {
  auto src = dsbs::make_source(0.25);
  for (double d : {0.0, 0.05, 0.1, 0.1464466094067262}) {
    auto ch = dsbs::cascade_channel(0.25, d);
    auto e = testing::pair_cmi(src, ch.probs);
    double want = dsbs::rd(0.25, d);
    CHECK(e.mi_x == doctest::Approx(want).epsilon(1e-12));
    CHECK(e.mi_y == doctest::Approx(want).epsilon(1e-12));
    CHECK(expected_distortion(src, ch, 1) == doctest::Approx(d).epsilon(1e-12));
    CHECK(expected_distortion(src, ch, 2) == doctest::Approx(d).epsilon(1e-12));
  }
}

TEST_CASE("cascade channel collapses to a common reconstruction at d*") {
  auto ch = dsbs::cascade_channel(0.25, dsbs::d_star(0.25));
  for (std::size_t z = 0; z < 4; ++z) {
    CHECK(ch.probs(z, 1) == doctest::Approx(0.0));  // xhat=0, yhat=1
    CHECK(ch.probs(z, 2) == doctest::Approx(0.0));  // xhat=1, yhat=0
  }
}

TEST_CASE("cascade channel at rho=0, d=0 is the identity") {
  auto ch = dsbs::cascade_channel(0.0, 0.0);
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      if (x != y) continue;  // off-diagonal inputs carry no DSBS(0) mass
      CHECK(ch.probs(x * 2 + y, x * 2 + y) == doctest::Approx(1.0));
    }
}

TEST_CASE("four-input channel marginals are BSC(d)") {
  double rho = 0.25;
  auto src = dsbs::make_source(rho);
  for (double d : {dsbs::d_star(rho), 0.2, 0.3, 0.5}) {
    auto ch = dsbs::four_input_channel(rho, d);
    // p(what | x): crossover must equal d on both sides
    auto q_x = src.q_x();
    for (int x = 0; x < 2; ++x) {
      double cross = 0.0;
      for (int y = 0; y < 2; ++y) {
        double qyx = src.q_xy(x, y) / q_x[x];
        cross += qyx * ch.probs(x * 2 + y, 1 - x);
      }
      CHECK(cross == doctest::Approx(d).epsilon(1e-12));
    }
    auto e = testing::pair_cmi(src, ch.probs);
    CHECK(e.mi_x == doctest::Approx(dsbs::cr_upper(rho, d)).epsilon(1e-9));
    CHECK(e.mi_y == doctest::Approx(dsbs::cr_upper(rho, d)).epsilon(1e-9));
  }
  CHECK_THROWS_AS(dsbs::four_input_channel(0.25, 0.05), Error);
}

TEST_CASE("gaussian closed forms") {
  gaussian::GaussianSpec spec;
  spec.sigma_x2 = 1.0;
  spec.sigma_y2 = 1.0;
  spec.rho = 0.5;
  CHECK(gaussian::conditional_rd(spec, 1, 0.25) ==
        doctest::Approx(0.792481250360578).epsilon(1e-12));
  CHECK(gaussian::conditional_rd(spec, 1, 0.75) == 0.0);
  CHECK(gaussian::region(spec, 0.25, 0.75) ==
        doctest::Approx(0.792481250360578).epsilon(1e-12));
  CHECK(gaussian::region(spec, 0.75, 0.75) == 0.0);

  gaussian::GaussianSpec uncorr;
  uncorr.rho = 0.0;
  CHECK(gaussian::conditional_rd(uncorr, 1, 0.25) == doctest::Approx(1.0));
  CHECK_THROWS_AS(gaussian::conditional_rd(spec, 1, 0.0), Error);

  // non-increasing in d
  double prev = 10.0;
  for (double d = 0.05; d <= 1.2; d += 0.05) {
    double r = gaussian::conditional_rd(spec, 1, d);
    CHECK(r <= prev + 1e-12);
    CHECK(r >= 0.0);
    prev = r;
  }
}

TEST_CASE("figure curves") {
  auto grid = dsbs::default_figure_grid(0.01);
  auto t = dsbs::figure_curves(0.25, grid);
  CHECK(t.d_star == doctest::Approx(0.1464466094067262));
  for (const auto& row : t.rows) {
    CHECK(row.r == doctest::Approx(dsbs::rd(0.25, row.d)));
    CHECK(row.past_dstar == (row.d > t.d_star));
    if (row.past_dstar) {
      REQUIRE(row.cr_upper.has_value());
      CHECK(*row.cr_upper >= row.r - 1e-9);
    } else {
      CHECK(!row.cr_upper.has_value());
    }
  }
  CHECK(dsbs::figure_curves(0.15, {}).rows.empty());
  CHECK(dsbs::d_star(0.15) == doctest::Approx(0.08166998673296222).epsilon(1e-10));
}
