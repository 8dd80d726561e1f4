#include "twrn/json_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "twrn/csv.hpp"
#include "twrn/errors.hpp"

namespace twrn {

namespace {

using nlohmann::json;

json parse_or_throw(const std::string& text, const std::string& what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded())
    throw Error(ErrorCode::BadInputFile, what + ": not valid JSON");
  return j;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::BadInputFile, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Mat mat_from_json(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty() || !j[0].is_array())
    throw Error(ErrorCode::BadInputFile, field + ": expected a 2-d array");
  std::vector<std::vector<double>> rows;
  for (const auto& row : j) {
    if (!row.is_array())
      throw Error(ErrorCode::BadInputFile, field + ": ragged rows");
    std::vector<double> r;
    for (const auto& v : row) {
      if (!v.is_number())
        throw Error(ErrorCode::BadInputFile, field + ": non-numeric entry");
      r.push_back(v.get<double>());
    }
    rows.push_back(std::move(r));
  }
  try {
    return Mat::from_rows(rows);
  } catch (const Error& e) {
    throw Error(ErrorCode::BadInputFile, field + ": " + e.what());
  }
}

std::vector<std::string> labels_from_json(const json& j, const std::string& field) {
  std::vector<std::string> out;
  if (j.is_null()) return out;
  if (!j.is_array()) throw Error(ErrorCode::BadInputFile, field + ": expected an array");
  for (const auto& v : j) {
    if (v.is_string())
      out.push_back(v.get<std::string>());
    else
      out.push_back(v.dump());
  }
  return out;
}

}  // namespace

JointSource parse_joint_source(const std::string& text) {
  json j = parse_or_throw(text, "source file");
  if (!j.contains("q_xy"))
    throw Error(ErrorCode::BadInputFile, "source file: missing field q_xy");
  if (!j.contains("delta1") || !j.contains("delta2"))
    throw Error(ErrorCode::BadInputFile, "source file: missing delta1/delta2");
  JointSource s;
  s.q_xy = mat_from_json(j["q_xy"], "q_xy");
  s.delta1 = mat_from_json(j["delta1"], "delta1");
  s.delta2 = mat_from_json(j["delta2"], "delta2");
  s.x_alphabet = labels_from_json(j.value("x_alphabet", json()), "x_alphabet");
  s.y_alphabet = labels_from_json(j.value("y_alphabet", json()), "y_alphabet");
  s.xhat_alphabet = labels_from_json(j.value("xhat_alphabet", json()), "xhat_alphabet");
  s.yhat_alphabet = labels_from_json(j.value("yhat_alphabet", json()), "yhat_alphabet");
  return validate_joint_source(std::move(s));
}

JointSource load_joint_source(const std::string& path) {
  return parse_joint_source(slurp(path));
}

std::string joint_source_to_json(const JointSource& src) {
  json j;
  j["x_alphabet"] = src.x_alphabet;
  j["y_alphabet"] = src.y_alphabet;
  j["xhat_alphabet"] = src.xhat_alphabet;
  j["yhat_alphabet"] = src.yhat_alphabet;
  auto mat = [](const Mat& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows; ++i) {
      json row = json::array();
      for (std::size_t k = 0; k < m.cols; ++k) row.push_back(m(i, k));
      rows.push_back(row);
    }
    return rows;
  };
  j["q_xy"] = mat(src.q_xy);
  j["delta1"] = mat(src.delta1);
  j["delta2"] = mat(src.delta2);
  return j.dump(2);
}

BroadcastChannelSpec parse_broadcast_channel(const std::string& text) {
  json j = parse_or_throw(text, "channel file");
  if (!j.contains("q_uv_w"))
    throw Error(ErrorCode::BadInputFile, "channel file: missing field q_uv_w");
  const json& t = j["q_uv_w"];
  if (!t.is_array() || t.empty() || !t[0].is_array() || t[0].empty() ||
      !t[0][0].is_array())
    throw Error(ErrorCode::BadInputFile, "q_uv_w: expected a 3-d array");
  BroadcastChannelSpec bc;
  std::size_t nw = t.size(), nu = t[0].size(), nv = t[0][0].size();
  bc.q_uv_w = Tensor3(nw, nu, nv);
  for (std::size_t w = 0; w < nw; ++w) {
    if (!t[w].is_array() || t[w].size() != nu)
      throw Error(ErrorCode::BadInputFile, "q_uv_w: ragged tensor");
    for (std::size_t u = 0; u < nu; ++u) {
      if (!t[w][u].is_array() || t[w][u].size() != nv)
        throw Error(ErrorCode::BadInputFile, "q_uv_w: ragged tensor");
      for (std::size_t v = 0; v < nv; ++v) {
        if (!t[w][u][v].is_number())
          throw Error(ErrorCode::BadInputFile, "q_uv_w: non-numeric entry");
        bc.q_uv_w(w, u, v) = t[w][u][v].get<double>();
      }
    }
  }
  bc.w_alphabet = labels_from_json(j.value("w_alphabet", json()), "w_alphabet");
  bc.u_alphabet = labels_from_json(j.value("u_alphabet", json()), "u_alphabet");
  bc.v_alphabet = labels_from_json(j.value("v_alphabet", json()), "v_alphabet");
  if (!j.contains("kappa") || !j["kappa"].is_number())
    throw Error(ErrorCode::BadInputFile, "channel file: missing numeric kappa");
  bc.kappa = j["kappa"].get<double>();
  return validate_broadcast(std::move(bc));
}

BroadcastChannelSpec load_broadcast_channel(const std::string& path) {
  return parse_broadcast_channel(slurp(path));
}

std::string verdict_to_json(const FeasibilityVerdict& v) {
  json j;
  j["verdict"] = verdict_name(v.verdict);
  j["exact"] = v.exact;
  j["margin_x_bits"] = v.margin_x;
  j["margin_y_bits"] = v.margin_y;
  if (v.witness_pw) j["witness_pw"] = *v.witness_pw;
  if (v.witness_test_channel) {
    const Channel& ch = *v.witness_test_channel;
    json rows = json::array();
    for (std::size_t i = 0; i < ch.probs.rows; ++i) {
      json row = json::array();
      for (std::size_t k = 0; k < ch.probs.cols; ++k) row.push_back(ch.probs(i, k));
      rows.push_back(row);
    }
    j["witness_test_channel"] = rows;
    j["witness_in_dims"] = ch.in_dims;
    j["witness_out_dims"] = ch.out_dims;
  }
  return j.dump(2);
}

}  // namespace twrn
