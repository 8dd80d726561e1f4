#pragma once

#include <vector>

#include "twrn/types.hpp"

namespace twrn {

struct CrResult {
  double rate = 0.0;  // bits; max of the two conditional mutual informations
  Channel channel;    // p(xhat, yhat | x, y), or p(xhat | x, y) for the
                      // max-distortion variant
  double mi_x = 0.0;  // I(X; reconstruction | Y)
  double mi_y = 0.0;  // I(Y; reconstruction | X)
  std::vector<double> achieved_distortions;
  int iterations = 0;
  bool converged = true;
  double dual_value = 0.0;  // certified lower bound on the minimax value
};

// R_CR(d1,d2): minimize max{I(X;Xhat,Yhat|Y), I(Y;Xhat,Yhat|X)} over the
// distortion-feasible test channels. Convex minimax, solved globally.
CrResult cr_rd(const JointSource& src, double d1, double d2, const SolverConfig& cfg);

// max{R_XY - R_X, R_XY - R_Y}: the joint-RD upper bound on R_CR.
double cr_rd_joint_upper(const JointSource& src, double d1, double d2,
                         const SolverConfig& cfg);

// R_CR(d1, d_2max): one reconstruction only, channel p(xhat | x, y).
CrResult cr_rd_max_distortion(const JointSource& src, double d1, const SolverConfig& cfg);

struct CrSweepRow {
  double d1 = 0.0, d2 = 0.0;
  double r_cr = 0.0;
  double mi_x = 0.0, mi_y = 0.0;
  double gap_to_rl = 0.0;
  bool equality = false;  // gap below the detection threshold
};

// Empirical equality-region sweep: flags points where R_CR meets the cut-set
// lower bound within 5x the solver tolerance.
std::vector<CrSweepRow> cr_equality_sweep(const JointSource& src,
                                          const std::vector<std::pair<double, double>>& points,
                                          const SolverConfig& cfg);

}  // namespace twrn

namespace twrn::ba {
struct CmiTerm;
}
namespace twrn {
// Builds the I(.;V|Y) / I(.;V|X) groupings over inputs z = x*ny + y. Shared
// by the CR solver and the single-description bounds.
void cr_terms(std::size_t nx, std::size_t ny, ba::CmiTerm& given_y, ba::CmiTerm& given_x);
}  // namespace twrn
