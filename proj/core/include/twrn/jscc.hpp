#pragma once

#include <optional>
#include <string>
#include <vector>

#include "twrn/types.hpp"

namespace twrn {

// Broadcast channel p(u, v | w) with bandwidth expansion kappa (channel
// symbols per source symbol).
struct BroadcastChannelSpec {
  std::vector<std::string> w_alphabet;
  std::vector<std::string> u_alphabet;
  std::vector<std::string> v_alphabet;
  Tensor3 q_uv_w;  // indexed [w][u][v]
  double kappa = 1.0;

  std::size_t nw() const { return q_uv_w.n0; }
  std::size_t nu() const { return q_uv_w.n1; }
  std::size_t nv() const { return q_uv_w.n2; }

  Mat channel_u() const;  // marginal p(u|w)
  Mat channel_v() const;  // marginal p(v|w)
};

BroadcastChannelSpec validate_broadcast(BroadcastChannelSpec raw);

struct FrontierPoint {
  double lambda = 0.0;
  double mi_u = 0.0;  // I(W;U) bits
  double mi_v = 0.0;  // I(W;V) bits
  std::vector<double> p_w;
};

// Pareto frontier of the achievable (I(W;U), I(W;V)) region, traced by
// weighted-sum Arimoto ascent over a lambda grid.
std::vector<FrontierPoint> channel_mi_frontier(const BroadcastChannelSpec& bc,
                                               int n_weights, const SolverConfig& cfg);

enum class Verdict { Feasible, Infeasible, Boundary };

struct FeasibilityVerdict {
  Verdict verdict = Verdict::Infeasible;
  bool exact = false;  // true when the criterion is necessary and sufficient
  std::optional<std::vector<double>> witness_pw;
  std::optional<Channel> witness_test_channel;
  double margin_x = 0.0;  // kappa I(W;U) minus the x-side requirement, bits
  double margin_y = 0.0;
};

const char* verdict_name(Verdict v);

// Necessary condition: R_{X|Y}(d1) <= kappa I(W;U) and R_{Y|X}(d2) <= kappa
// I(W;V) for a common input law. Infeasible certifies non-achievability.
FeasibilityVerdict jscc_cut_set_feasible(const JointSource& src,
                                         const BroadcastChannelSpec& bc, double d1,
                                         double d2, const SolverConfig& cfg);

// Exact common-reconstruction criterion: the source requirement pair region
// must intersect the kappa-scaled channel region.
FeasibilityVerdict jscc_cr_achievable(const JointSource& src,
                                      const BroadcastChannelSpec& bc, double d1,
                                      double d2, const SolverConfig& cfg);

// Zero-distortion criterion with Hamming measures (exact).
FeasibilityVerdict tuncel_zero_distortion_feasible(const JointSource& src,
                                                   const BroadcastChannelSpec& bc,
                                                   const SolverConfig& cfg);

// Verifies an explicit sufficient-condition candidate: description channel
// p(c|x,y), decoder tables and channel input law.
FeasibilityVerdict nayak_sufficient_check(const JointSource& src,
                                          const BroadcastChannelSpec& bc, double d1,
                                          double d2, const Channel& c_channel,
                                          const std::vector<int>& pi1,
                                          const std::vector<int>& pi2,
                                          const std::vector<double>& p_w,
                                          const SolverConfig& cfg);

}  // namespace twrn
