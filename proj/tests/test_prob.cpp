#include <doctest.h>

#include <cmath>

#include "instances.hpp"
#include "twrn/prob.hpp"
#include "twrn/rng.hpp"

using namespace twrn;

namespace {
constexpr double kH25 = 0.8112781244591328;   // h(0.25)
constexpr double kH10 = 0.4689955935892812;   // h(0.1)
}  // namespace

TEST_CASE("entropy basics") {
  CHECK(entropy_bits(std::vector<double>{0.5, 0.5}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(entropy_bits(std::vector<double>{1.0, 0.0}) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(entropy_bits(std::vector<double>{0.25, 0.75}) ==
        doctest::Approx(kH25).epsilon(1e-12));
}

TEST_CASE("binary entropy") {
  CHECK(binary_entropy(0.5) == doctest::Approx(1.0));
  CHECK(binary_entropy(0.0) == 0.0);
  CHECK(binary_entropy(1.0) == 0.0);
  CHECK(binary_entropy(0.1) == doctest::Approx(kH10).epsilon(1e-12));
  CHECK(binary_entropy(0.3) == doctest::Approx(binary_entropy(0.7)).epsilon(1e-12));
  CHECK_THROWS_AS(binary_entropy(-0.1), Error);
  CHECK_THROWS_AS(binary_entropy(1.1), Error);
}

TEST_CASE("binary convolution") {
  CHECK(binary_convolution(0.0, 0.3) == doctest::Approx(0.3));
  CHECK(binary_convolution(0.5, 0.2) == doctest::Approx(0.5));
  CHECK(binary_convolution(0.1, 0.2) == doctest::Approx(0.26).epsilon(1e-14));
  CHECK_THROWS_AS(binary_convolution(-0.01, 0.2), Error);

  Rng rng(7);
  for (int i = 0; i < 200; ++i) {
    double a = rng.next_double(), b = rng.next_double();
    CHECK(binary_convolution(a, b) == doctest::Approx(binary_convolution(b, a)));
  }
  // monotone in each argument on [0, 1/2]^2
  for (int i = 0; i < 200; ++i) {
    double a = 0.5 * rng.next_double(), b = 0.5 * rng.next_double();
    double bump = 0.5 * rng.next_double() * (0.5 - a);
    CHECK(binary_convolution(a + bump, b) >= binary_convolution(a, b) - 1e-15);
    double bump_b = 0.5 * rng.next_double() * (0.5 - b);
    CHECK(binary_convolution(a, b + bump_b) >= binary_convolution(a, b) - 1e-15);
  }
}

TEST_CASE("mutual information") {
  Mat product(2, 2);
  product(0, 0) = 0.35 * 0.6;
  product(0, 1) = 0.35 * 0.4;
  product(1, 0) = 0.65 * 0.6;
  product(1, 1) = 0.65 * 0.4;
  CHECK(mutual_information_bits(product) == doctest::Approx(0.0).epsilon(1e-12));

  Mat ident(2, 2, 0.0);
  ident(0, 0) = ident(1, 1) = 0.5;
  CHECK(mutual_information_bits(ident) == doctest::Approx(1.0));

  Mat dsbs(2, 2);
  dsbs(0, 0) = dsbs(1, 1) = 0.375;
  dsbs(0, 1) = dsbs(1, 0) = 0.125;
  CHECK(mutual_information_bits(dsbs) == doctest::Approx(1.0 - kH25).epsilon(1e-12));
}

TEST_CASE("conditional mutual information") {
  // C independent of (A, B)
  Tensor3 t(2, 2, 2);
  Rng rng(3);
  auto pab = rng.next_pmf(4);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c) t(a, b, c) = pab[a * 2 + b] * 0.5;
  CHECK(conditional_mutual_information_bits(t, 1) == doctest::Approx(0.0).epsilon(1e-12));

  // A = C given any B, A|B uniform
  Tensor3 u(2, 2, 2, 0.0);
  for (int b = 0; b < 2; ++b)
    for (int a = 0; a < 2; ++a) u(a, b, a) = 0.25;
  CHECK(conditional_mutual_information_bits(u, 1) == doctest::Approx(1.0));
}

TEST_CASE("cmi midpoint convexity in the channel") {
  Rng rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    auto pab = rng.next_pmf(4);
    Mat ch1 = testing::random_channel(rng, 4, 3);
    Mat ch2 = testing::random_channel(rng, 4, 3);
    auto cmi_of = [&](const Mat& ch) {
      Tensor3 t(2, 2, 3);
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          for (int c = 0; c < 3; ++c) t(a, b, c) = pab[a * 2 + b] * ch(a * 2 + b, c);
      return conditional_mutual_information_bits(t, 1);
    };
    Mat mix(4, 3);
    for (std::size_t i = 0; i < mix.a.size(); ++i)
      mix.a[i] = 0.5 * (ch1.a[i] + ch2.a[i]);
    CHECK(cmi_of(mix) <= 0.5 * cmi_of(ch1) + 0.5 * cmi_of(ch2) + 1e-12);
  }
}

TEST_CASE("chain rule identity I(X;V|Y) = I(XY;V) - I(Y;V)") {
  Rng rng(17);
  for (int trial = 0; trial < 1000; ++trial) {
    std::size_t nx = 2 + rng.next_below(2), ny = 2 + rng.next_below(2);
    std::size_t nv = 2 + rng.next_below(3);
    auto q = rng.next_pmf(nx * ny);
    Mat ch = testing::random_channel(rng, nx * ny, nv);

    Tensor3 t(nx, ny, nv);
    Mat joint_zv(nx * ny, nv);
    Mat joint_yv(ny, nv, 0.0);
    for (std::size_t x = 0; x < nx; ++x)
      for (std::size_t y = 0; y < ny; ++y)
        for (std::size_t v = 0; v < nv; ++v) {
          double p = q[x * ny + y] * ch(x * ny + y, v);
          t(x, y, v) = p;
          joint_zv(x * ny + y, v) = p;
          joint_yv(y, v) += p;
        }
    double lhs = conditional_mutual_information_bits(t, 1);
    double rhs = mutual_information_bits(joint_zv) - mutual_information_bits(joint_yv);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("information measures stay nonnegative on random instances") {
  Rng rng(23);
  for (int trial = 0; trial < 500; ++trial) {
    std::size_t n = 2 + rng.next_below(4);
    auto p = rng.next_pmf(n);
    CHECK(entropy_bits(p) >= 0.0);
    Mat j(2, 3);
    auto q = rng.next_pmf(6);
    std::copy(q.begin(), q.end(), j.a.begin());
    CHECK(mutual_information_bits(j) >= 0.0);
  }
}
