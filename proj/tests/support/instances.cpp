#include "instances.hpp"

#include <cmath>

#include "twrn/prob.hpp"

namespace twrn::testing {

JointSource hamming_source(const Mat& q_xy) {
  JointSource s;
  s.q_xy = q_xy;
  s.delta1 = Mat(q_xy.rows, q_xy.rows, 1.0);
  for (std::size_t i = 0; i < q_xy.rows; ++i) s.delta1(i, i) = 0.0;
  s.delta2 = Mat(q_xy.cols, q_xy.cols, 1.0);
  for (std::size_t i = 0; i < q_xy.cols; ++i) s.delta2(i, i) = 0.0;
  return validate_joint_source(std::move(s));
}

JointSource random_hamming_source(Rng& rng, std::size_t nx, std::size_t ny,
                                  double min_mass) {
  auto p = rng.next_pmf(nx * ny);
  // keep entries bounded away from zero so conditional pmfs stay benign
  double total = 0.0;
  for (auto& v : p) {
    v = min_mass / (nx * ny) + (1.0 - min_mass) * v;
    total += v;
  }
  Mat q(nx, ny);
  for (std::size_t i = 0; i < nx * ny; ++i) q.a[i] = p[i] / total;
  return hamming_source(q);
}

JointSource independent_uniform_binary() {
  Mat q(2, 2, 0.25);
  return hamming_source(q);
}

JointSource product_source(const std::vector<double>& q_x, const std::vector<double>& q_y) {
  Mat q(q_x.size(), q_y.size());
  for (std::size_t x = 0; x < q_x.size(); ++x)
    for (std::size_t y = 0; y < q_y.size(); ++y) q(x, y) = q_x[x] * q_y[y];
  return hamming_source(q);
}

JointSource deterministic_function_source(const Mat& q_xy, const std::vector<int>& psi_x,
                                          int n_u, const std::vector<int>& psi_y, int n_v) {
  JointSource s;
  s.q_xy = q_xy;
  s.delta1 = Mat(q_xy.rows, n_u, 1.0);
  for (std::size_t x = 0; x < q_xy.rows; ++x) s.delta1(x, psi_x[x]) = 0.0;
  s.delta2 = Mat(q_xy.cols, n_v, 1.0);
  for (std::size_t y = 0; y < q_xy.cols; ++y) s.delta2(y, psi_y[y]) = 0.0;
  return validate_joint_source(std::move(s));
}

Mat random_channel(Rng& rng, std::size_t n_in, std::size_t n_out) {
  Mat m(n_in, n_out);
  for (std::size_t i = 0; i < n_in; ++i) {
    auto row = rng.next_pmf(n_out);
    std::copy(row.begin(), row.end(), m.row(i).begin());
  }
  return m;
}

double cond_entropy_x_given_y(const JointSource& src) {
  auto q_y = src.q_y();
  double h = 0.0;
  for (std::size_t x = 0; x < src.nx(); ++x)
    for (std::size_t y = 0; y < src.ny(); ++y) {
      double p = src.q_xy(x, y);
      if (p > 0.0) h -= p * std::log2(p / q_y[y]);
    }
  return h;
}

double cond_entropy_y_given_x(const JointSource& src) {
  auto q_x = src.q_x();
  double h = 0.0;
  for (std::size_t x = 0; x < src.nx(); ++x)
    for (std::size_t y = 0; y < src.ny(); ++y) {
      double p = src.q_xy(x, y);
      if (p > 0.0) h -= p * std::log2(p / q_x[x]);
    }
  return h;
}

PairEval pair_cmi(const JointSource& src, const Mat& p_v) {
  Tensor3 joint(src.nx(), src.ny(), p_v.cols);
  for (std::size_t x = 0; x < src.nx(); ++x)
    for (std::size_t y = 0; y < src.ny(); ++y)
      for (std::size_t v = 0; v < p_v.cols; ++v)
        joint(x, y, v) = src.q_xy(x, y) * p_v(x * src.ny() + y, v);
  PairEval e;
  e.mi_x = conditional_mutual_information_bits(joint, 1);
  e.mi_y = conditional_mutual_information_bits(joint, 0);
  return e;
}

}  // namespace twrn::testing
