#include <doctest.h>

#include "instances.hpp"
#include "twrn/closed_forms.hpp"
#include "twrn/json_io.hpp"
#include "twrn/types.hpp"

using namespace twrn;

TEST_CASE("validate_joint_source accepts the DSBS") {
  auto s = dsbs::make_source(0.25);
  CHECK(s.q_xy(0, 0) == doctest::Approx(0.375));
  CHECK(s.q_xy(0, 1) == doctest::Approx(0.125));
  CHECK(s.nx() == 2);
  CHECK(s.d1_max() == 1.0);
}

TEST_CASE("validate_joint_source accepts a point mass") {
  JointSource s;
  s.q_xy = Mat(2, 2, 0.0);
  s.q_xy(0, 0) = 1.0;
  s.delta1 = Mat(2, 2, 1.0);
  s.delta1(0, 0) = s.delta1(1, 1) = 0.0;
  s.delta2 = s.delta1;
  CHECK_NOTHROW(validate_joint_source(s));
}

TEST_CASE("validate_joint_source rejects bad inputs") {
  JointSource s;
  s.q_xy = Mat(2, 2, 0.0);
  s.q_xy(0, 0) = 0.6;
  s.q_xy(0, 1) = 0.5;
  s.delta1 = Mat(2, 2, 1.0);
  s.delta1(0, 0) = s.delta1(1, 1) = 0.0;
  s.delta2 = s.delta1;
  CHECK_THROWS_WITH_AS(validate_joint_source(s), doctest::Contains("sums to"), Error);

  s.q_xy(0, 0) = 0.5;
  s.q_xy(0, 1) = -0.1;
  s.q_xy(1, 1) = 0.6;
  CHECK_THROWS_AS(validate_joint_source(s), Error);

  s.q_xy(0, 1) = 0.1;
  s.q_xy(1, 1) = 0.4;
  s.delta1(1, 0) = 0.3;
  s.delta1(1, 1) = 0.2;  // no zero in the second row
  CHECK_THROWS_AS(validate_joint_source(s), Error);
}

TEST_CASE("pmf drift below threshold is renormalized") {
  JointSource s;
  s.q_xy = Mat(1, 2, 0.0);
  s.q_xy(0, 0) = 0.5 + 2e-10;
  s.q_xy(0, 1) = 0.5;
  s.delta1 = Mat(1, 1, 0.0);
  s.delta2 = Mat(2, 2, 1.0);
  s.delta2(0, 0) = s.delta2(1, 1) = 0.0;
  auto v = validate_joint_source(s);
  CHECK(sum(v.q_xy.a) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("expected_distortion worked examples") {
  auto s = testing::independent_uniform_binary();

  Channel ident;
  ident.in_dims = {2};
  ident.out_dims = {2};
  ident.probs = Mat(2, 2, 0.0);
  ident.probs(0, 0) = ident.probs(1, 1) = 1.0;
  CHECK(expected_distortion(s, ident, 1) == doctest::Approx(0.0));

  Channel constant;
  constant.in_dims = {2};
  constant.out_dims = {2};
  constant.probs = Mat(2, 2, 0.0);
  constant.probs(0, 0) = constant.probs(1, 0) = 1.0;
  CHECK(expected_distortion(s, constant, 1) == doctest::Approx(0.5));

  auto dsbs_src = dsbs::make_source(0.25);
  Channel bsc;
  bsc.in_dims = {2};
  bsc.out_dims = {2};
  bsc.probs = Mat(2, 2, 0.1);
  bsc.probs(0, 0) = bsc.probs(1, 1) = 0.9;
  CHECK(expected_distortion(dsbs_src, bsc, 1) == doctest::Approx(0.1).epsilon(1e-14));

  Channel wrong;
  wrong.in_dims = {3};
  wrong.out_dims = {2};
  wrong.probs = Mat(3, 2, 0.5);
  CHECK_THROWS_AS(expected_distortion(dsbs_src, wrong, 1), Error);
}

TEST_CASE("solver config validation") {
  SolverConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.tol = 0.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg.tol = 1e-9;
  cfg.n_starts = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("joint source JSON round trip") {
  auto s = dsbs::make_source(0.3);
  auto text = joint_source_to_json(s);
  auto back = parse_joint_source(text);
  for (std::size_t i = 0; i < 4; ++i) CHECK(back.q_xy.a[i] == doctest::Approx(s.q_xy.a[i]));
  CHECK(back.x_alphabet == s.x_alphabet);
}

TEST_CASE("malformed source JSON reports BadInputFile") {
  CHECK_THROWS_AS(parse_joint_source("{"), Error);
  CHECK_THROWS_AS(parse_joint_source("{\"q_xy\": 3}"), Error);
  CHECK_THROWS_AS(parse_joint_source("{\"q_xy\": [[0.5,0.5]]}"), Error);
}
