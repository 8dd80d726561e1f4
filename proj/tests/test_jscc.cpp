#include <doctest.h>

#include <cmath>

#include "instances.hpp"
#include "twrn/aux_solvers.hpp"
#include "twrn/closed_forms.hpp"
#include "twrn/jscc.hpp"
#include "twrn/rd_solvers.hpp"

using namespace twrn;

namespace {

const SolverConfig kCfg;

// Broadcast channel with conditionally independent BSC legs.
BroadcastChannelSpec bsc_pair(double eps_u, double eps_v, double kappa) {
  BroadcastChannelSpec bc;
  bc.q_uv_w = Tensor3(2, 2, 2);
  for (int w = 0; w < 2; ++w)
    for (int u = 0; u < 2; ++u)
      for (int v = 0; v < 2; ++v) {
        double pu = (u == w) ? 1.0 - eps_u : eps_u;
        double pv = (v == w) ? 1.0 - eps_v : eps_v;
        bc.q_uv_w(w, u, v) = pu * pv;
      }
  bc.kappa = kappa;
  return validate_broadcast(std::move(bc));
}

constexpr double kCap01 = 0.5310044064107188;  // 1 - h(0.1)
constexpr double kCap02 = 0.2780719051126377;  // 1 - h(0.2)

}  // namespace

TEST_CASE("frontier of a symmetric BSC pair is a single point") {
  auto bc = bsc_pair(0.1, 0.1, 1.0);
  auto pts = channel_mi_frontier(bc, 11, kCfg);
  REQUIRE(pts.size() == 11);
  for (const auto& p : pts) {
    CHECK(p.mi_u == doctest::Approx(kCap01).epsilon(1e-6));
    CHECK(p.mi_v == doctest::Approx(kCap01).epsilon(1e-6));
    CHECK(p.p_w[0] == doctest::Approx(0.5).epsilon(1e-4));
  }
}

TEST_CASE("frontier with a useless second channel") {
  auto bc = bsc_pair(0.1, 0.5, 1.0);
  auto pts = channel_mi_frontier(bc, 5, kCfg);
  for (const auto& p : pts) {
    CHECK(p.mi_v == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(p.mi_u <= kCap01 + 1e-9);
  }
  CHECK(pts.front().mi_u == doctest::Approx(kCap01).epsilon(1e-6));
}

TEST_CASE("asymmetric BSC pair frontier point") {
  auto bc = bsc_pair(0.1, 0.2, 1.0);
  auto pts = channel_mi_frontier(bc, 3, kCfg);
  // the uniform input maximizes both coordinates at once
  for (const auto& p : pts) {
    CHECK(p.mi_u == doctest::Approx(kCap01).epsilon(1e-6));
    CHECK(p.mi_v == doctest::Approx(kCap02).epsilon(1e-6));
  }
}

TEST_CASE("frontier points form a concave chain") {
  auto bc = bsc_pair(0.05, 0.25, 1.0);
  auto pts = channel_mi_frontier(bc, 21, kCfg);
  for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
    double a = pts[i - 1].mi_u, b = pts[i + 1].mi_u;
    if (std::abs(b - a) < 1e-12) continue;
    double t = (pts[i].mi_u - a) / (b - a);
    if (t < 0.0 || t > 1.0) continue;
    double chord = (1.0 - t) * pts[i - 1].mi_v + t * pts[i + 1].mi_v;
    CHECK(pts[i].mi_v >= chord - 1e-6);
  }
}

TEST_CASE("cut-set feasibility flips with bandwidth expansion") {
  auto src = dsbs::make_source(0.25);
  auto bc2 = bsc_pair(0.1, 0.2, 2.0);
  auto v2 = jscc_cut_set_feasible(src, bc2, 0.0, 0.0, kCfg);
  CHECK(v2.verdict == Verdict::Infeasible);
  CHECK(!v2.exact);

  auto bc3 = bsc_pair(0.1, 0.2, 3.0);
  auto v3 = jscc_cut_set_feasible(src, bc3, 0.0, 0.0, kCfg);
  CHECK(v3.verdict == Verdict::Feasible);
  REQUIRE(v3.witness_pw.has_value());
  CHECK(v3.margin_x >= -1e-6);
  CHECK(v3.margin_y >= -1e-6);

  auto vmax = jscc_cut_set_feasible(src, bc2, 1.0, 1.0, kCfg);
  CHECK(vmax.verdict == Verdict::Feasible);
}

TEST_CASE("tuncel zero-distortion criterion") {
  auto src = dsbs::make_source(0.25);
  auto t2 = tuncel_zero_distortion_feasible(src, bsc_pair(0.1, 0.2, 2.0), kCfg);
  CHECK(t2.verdict == Verdict::Infeasible);
  auto t3 = tuncel_zero_distortion_feasible(src, bsc_pair(0.1, 0.2, 3.0), kCfg);
  CHECK(t3.verdict == Verdict::Feasible);
  CHECK(t3.exact);

  // X = Y: zero conditional entropies, feasible for any nondegenerate channel
  auto same = dsbs::make_source(0.0);
  auto ts = tuncel_zero_distortion_feasible(same, bsc_pair(0.2, 0.3, 0.5), kCfg);
  CHECK(ts.verdict == Verdict::Feasible);

  // non-Hamming measures are rejected
  JointSource bad;
  bad.q_xy = Mat(2, 2, 0.25);
  bad.delta1 = Mat(2, 2, 1.0);
  bad.delta1(0, 0) = bad.delta1(1, 1) = 0.0;
  bad.delta1(0, 1) = 2.0;
  bad.delta2 = Mat(2, 2, 1.0);
  bad.delta2(0, 0) = bad.delta2(1, 1) = 0.0;
  auto vsrc = validate_joint_source(bad);
  CHECK_THROWS_AS(tuncel_zero_distortion_feasible(vsrc, bsc_pair(0.1, 0.1, 1.0), kCfg),
                  Error);
}

TEST_CASE("common-reconstruction achievability on the DSBS") {
  auto src = dsbs::make_source(0.25);
  auto bc = bsc_pair(0.1, 0.1, 1.0);
  auto v = jscc_cr_achievable(src, bc, 0.1, 0.1, kCfg);
  CHECK(v.verdict == Verdict::Feasible);
  CHECK(v.exact);
  REQUIRE(v.witness_pw.has_value());
  REQUIRE(v.witness_test_channel.has_value());
  CHECK(v.margin_x >= -1e-6);
  CHECK(v.margin_y >= -1e-6);
  CHECK(expected_distortion(src, *v.witness_test_channel, 1) <= 0.1 + 1e-6);
  CHECK(expected_distortion(src, *v.witness_test_channel, 2) <= 0.1 + 1e-6);

  // consistency: CR-achievable implies the necessary condition
  auto cut = jscc_cut_set_feasible(src, bc, 0.1, 0.1, kCfg);
  CHECK(cut.verdict != Verdict::Infeasible);

  // squeeze the channel until the CR criterion fails
  auto tight = bsc_pair(0.35, 0.35, 1.0);
  auto vt = jscc_cr_achievable(src, tight, 0.05, 0.05, kCfg);
  CHECK(vt.verdict == Verdict::Infeasible);
}

TEST_CASE("feasibility is monotone in distortion and bandwidth") {
  auto src = dsbs::make_source(0.25);
  auto verdict_at = [&](double d, double kappa) {
    return jscc_cut_set_feasible(src, bsc_pair(0.15, 0.15, kappa), d, d, kCfg).verdict;
  };
  CHECK(verdict_at(0.0, 0.5) == Verdict::Infeasible);
  CHECK(verdict_at(0.0, 3.0) == Verdict::Feasible);
  CHECK(verdict_at(0.2, 0.5) == Verdict::Feasible);  // milder requirement
}

TEST_CASE("nayak sufficient check on explicit candidates") {
  auto src = dsbs::make_source(0.25);
  auto bc = bsc_pair(0.05, 0.05, 2.0);

  // C = (X, Y) revealed, identity decoders
  Channel reveal;
  reveal.in_dims = {2, 2};
  reveal.out_dims = {4};
  reveal.probs = Mat(4, 4, 0.0);
  for (int z = 0; z < 4; ++z) reveal.probs(z, z) = 1.0;
  std::vector<int> pi1(4 * 2), pi2(4 * 2);
  for (int c = 0; c < 4; ++c)
    for (int s = 0; s < 2; ++s) {
      pi1[c * 2 + s] = c / 2;  // xhat = x component of c
      pi2[c * 2 + s] = c % 2;  // yhat = y component of c
    }
  auto v = nayak_sufficient_check(src, bc, 0.0, 0.0, reveal, pi1, pi2, {0.5, 0.5}, kCfg);
  CHECK(v.verdict == Verdict::Feasible);
  CHECK(v.exact);

  // starve the channel: same candidate must fail
  auto starved = bsc_pair(0.45, 0.45, 0.25);
  auto vs = nayak_sufficient_check(src, starved, 0.0, 0.0, reveal, pi1, pi2, {0.5, 0.5},
                                   kCfg);
  CHECK(vs.verdict == Verdict::Infeasible);

  std::vector<int> bad = pi1;
  bad[0] = 7;
  CHECK_THROWS_AS(
      nayak_sufficient_check(src, bc, 0.0, 0.0, reveal, bad, pi2, {0.5, 0.5}, kCfg),
      Error);
}

TEST_CASE("nayak check accepts the product of Wyner-Ziv solutions") {
  auto src = dsbs::make_source(0.25);
  double d = 0.1;
  auto w1 = wyner_ziv_rd(src, 1, d, kCfg);
  auto w2 = wyner_ziv_rd(src, 2, d, kCfg);

  const std::size_t na = w1.n_a, nb = w2.n_a;
  Channel prod;
  prod.in_dims = {2, 2};
  prod.out_dims = {na * nb};
  prod.probs = Mat(4, na * nb, 0.0);
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (std::size_t a = 0; a < na; ++a)
        for (std::size_t b = 0; b < nb; ++b)
          prod.probs(x * 2 + y, a * nb + b) =
              w1.helper_channel.probs(x, a) * w2.helper_channel.probs(y, b);
  std::vector<int> pi1(na * nb * 2), pi2(na * nb * 2);
  for (std::size_t a = 0; a < na; ++a)
    for (std::size_t b = 0; b < nb; ++b)
      for (int s = 0; s < 2; ++s) {
        pi1[(a * nb + b) * 2 + s] = w1.decoder[a * 2 + s];
        pi2[(a * nb + b) * 2 + s] = w2.decoder[b * 2 + s];
      }

  // generous channel: the construction must pass; margins reflect the WZ rates
  auto bc = bsc_pair(0.02, 0.02, 1.0);
  auto v = nayak_sufficient_check(src, bc, d, d, prod, pi1, pi2, {0.5, 0.5}, kCfg);
  CHECK(v.verdict == Verdict::Feasible);
  double cap = 1.0 - binary_entropy(0.02);
  CHECK(v.margin_x == doctest::Approx(cap - w1.rate).epsilon(1e-5));
  CHECK(v.margin_y == doctest::Approx(cap - w2.rate).epsilon(1e-5));
}
