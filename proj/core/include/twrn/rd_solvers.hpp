#pragma once

#include <utility>
#include <vector>

#include "twrn/ba.hpp"
#include "twrn/types.hpp"

namespace twrn {

// R_X(d): rate-distortion function of the pmf q_x under the distortion
// table delta (|X| x |Xhat|). Exact convex solve; the returned channel is
// feasible and rate carries a Lagrangian dual bound in RdResult::dual_value.
RdResult marginal_rd(const std::vector<double>& q_x, const Mat& delta, double d,
                     const SolverConfig& cfg);

// R_{X|Y}(d) for which == 1, R_{Y|X}(d) for which == 2: side information at
// encoder and decoder, channel p(xhat | x, y).
RdResult conditional_rd(const JointSource& src, int which, double d,
                        const SolverConfig& cfg);

// R_{XY}(d1, d2): joint description of both sources, channel
// p(xhat, yhat | x, y) under both distortion constraints.
RdResult joint_rd(const JointSource& src, double d1, double d2,
                  const SolverConfig& cfg);

// Conditional RD with an explicit side-information coupling: q_xs is the
// joint pmf of (X, S) as a |X| x |S| matrix, delta maps X to reconstructions.
// This is the inner engine behind conditional_rd and the Heegard-Berger
// bound's R_{X|CY} terms.
RdResult conditional_rd_general(const Mat& q_xs, const Mat& delta, double d,
                                const SolverConfig& cfg);

enum class RdSolverId { MarginalX, MarginalY, ConditionalX, ConditionalY, Joint };

// Sweeps the chosen solver across an ascending distortion grid (Joint uses
// d1 = d2 = d). Returns (d, rate) pairs.
std::vector<std::pair<double, double>> rd_curve(RdSolverId id, const JointSource& src,
                                                const std::vector<double>& grid,
                                                const SolverConfig& cfg);

// Shared translation from the solver config to inner-loop settings.
ba::ConstrainedOptions constrained_options(const SolverConfig& cfg);

}  // namespace twrn
