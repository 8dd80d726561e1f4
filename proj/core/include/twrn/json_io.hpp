#pragma once

#include <string>

#include "twrn/jscc.hpp"
#include "twrn/types.hpp"

namespace twrn {

// Schema: {"x_alphabet":[...], "y_alphabet":[...], "q_xy":[[...]],
//          "delta1":[[...]], "delta2":[[...]], "xhat_alphabet":[...],
//          "yhat_alphabet":[...]}  (row index = x, column index = y).
// Alphabet fields are optional; indices become labels. Throws BadInputFile
// on malformed documents, then the normal validation errors.
JointSource load_joint_source(const std::string& path);
JointSource parse_joint_source(const std::string& json_text);
std::string joint_source_to_json(const JointSource& src);

// Schema: {"w_alphabet":[...], "u_alphabet":[...], "v_alphabet":[...],
//          "q_uv_w":[[[...]]], "kappa": number} indexed [w][u][v].
BroadcastChannelSpec load_broadcast_channel(const std::string& path);
BroadcastChannelSpec parse_broadcast_channel(const std::string& json_text);

std::string verdict_to_json(const FeasibilityVerdict& v);

}  // namespace twrn
