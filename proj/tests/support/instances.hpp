#pragma once

#include <utility>
#include <vector>

#include "twrn/rng.hpp"
#include "twrn/types.hpp"

namespace twrn::testing {

// Sources used across the suites.
JointSource hamming_source(const Mat& q_xy);
JointSource random_hamming_source(Rng& rng, std::size_t nx, std::size_t ny,
                                  double min_mass = 0.02);
JointSource independent_uniform_binary();

// Product source q_x x q_y with Hamming measures.
JointSource product_source(const std::vector<double>& q_x, const std::vector<double>& q_y);

// Deterministic-reconstruction source: Xhat = U-alphabet with
// delta1(x, u) = [u != psi_x(x)], same on the Y side.
JointSource deterministic_function_source(const Mat& q_xy, const std::vector<int>& psi_x,
                                          int n_u, const std::vector<int>& psi_y, int n_v);

// Random channel rows (each row a Dirichlet draw).
Mat random_channel(Rng& rng, std::size_t n_in, std::size_t n_out);

// H(X|Y) and H(Y|X) in bits.
double cond_entropy_x_given_y(const JointSource& src);
double cond_entropy_y_given_x(const JointSource& src);

// max{I(X;V|Y), I(Y;V|X)} and distortions for a channel p(v | x,y) whose
// output may be a reconstruction pair; used to evaluate explicit candidates.
struct PairEval {
  double mi_x = 0.0, mi_y = 0.0;
};
PairEval pair_cmi(const JointSource& src, const Mat& p_v);

}  // namespace twrn::testing
