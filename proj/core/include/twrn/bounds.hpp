#pragma once

#include <optional>
#include <string>
#include <vector>

#include "twrn/aux_solvers.hpp"
#include "twrn/types.hpp"

namespace twrn {

// R_L(d1,d2) = max{R_{X|Y}(d1), R_{Y|X}(d2)}.
double cut_set_lower(const JointSource& src, double d1, double d2, const SolverConfig& cfg);

// R_U(d1,d2) = max of the two Wyner-Ziv rates.
double compress_linear_upper(const JointSource& src, double d1, double d2,
                             const SolverConfig& cfg);

// Shared result for the single-description bounds R_U* and R_U**.
struct DescriptionBound {
  double rate = 0.0;
  Channel channel;            // p(c | x, y)
  std::vector<int> decoder1;  // (c, y) -> xhat
  std::vector<int> decoder2;  // (c, x) -> yhat
  std::size_t n_c = 0;
  std::vector<double> achieved;  // distortions through the decoders
  double mi_x = 0.0, mi_y = 0.0;
  double inner_rate1 = 0.0, inner_rate2 = 0.0;  // R_U** refinement terms
  int iterations = 0;
  bool converged = true;
};

// R_U*(d1,d2): one common description C with per-receiver decoders.
// Heuristic (decoder space is combinatorial): alternates exact convex channel
// solves with decoder re-derivation across multiple starts. Optional hints
// carry Wyner-Ziv solutions whose product construction pins R_U* <= R_U.
DescriptionBound one_description_upper(const JointSource& src, double d1, double d2,
                                       const SolverConfig& cfg, std::size_t c_card = 0,
                                       const WzResult* wz_hint1 = nullptr,
                                       const WzResult* wz_hint2 = nullptr);

// R_U**(d1,d2): description C plus conditional-RD refinements. The inner
// conditional solves are exact; the outer channel search is heuristic.
DescriptionBound heegard_berger_upper(const JointSource& src, double d1, double d2,
                                      const SolverConfig& cfg, std::size_t c_card = 0,
                                      const DescriptionBound* r_u_star_hint = nullptr);

// True when delta can be written as g((x - xhat) mod l) on matching
// alphabets; fills g when requested.
bool is_difference_measure(const Mat& delta, std::vector<double>* g = nullptr);
bool is_hamming(const Mat& delta);

// C(d1,d2) = max{C_X(d1), C_Y(d2)}; throws NotDifferenceMeasure.
double minimax_gap(const JointSource& src, double d1, double d2, const SolverConfig& cfg);

struct AppendixCards {
  std::size_t a = 2, b = 2, c = 2;
};

struct AppendixCandidate {
  double value = 0.0;  // bits
  double residual_ab_given_xyc = 0.0;  // I(A;B | X,Y,C)
  double residual_xy_ab = 0.0;         // I(X,Y; A,B)
  std::vector<double> penalty_weights;
  std::vector<double> achieved;
  bool valid = false;  // cards meet the cardinality bounds and residuals < 1e-6
  int iterations = 0;
};

// Penalized heuristic evaluation of the auxiliary lower-bound program.
// The reported point always satisfies the decoder-distortion constraints, so
// its value dominates the cut-set bound regardless of the residuals.
AppendixCandidate appendix_lower_candidate(const JointSource& src, double d1, double d2,
                                           AppendixCards cards, const SolverConfig& cfg);

struct BoundBundle {
  double d1 = 0.0, d2 = 0.0;
  double r_l = 0.0;
  double r_u = 0.0;
  double r_u_star = 0.0;
  double r_u_dstar = 0.0;
  std::optional<double> c_gap;  // only for difference measures
  bool ordering_ok = false;

  struct Cert {
    std::string name;
    double value = 0.0;
    int iterations = 0;
    bool converged = true;
  };
  std::vector<Cert> certificates;
};

BoundBundle bound_bundle(const JointSource& src, double d1, double d2,
                         const SolverConfig& cfg);

}  // namespace twrn
