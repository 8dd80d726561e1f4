#include "cli.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "twrn/bounds.hpp"
#include "twrn/closed_forms.hpp"
#include "twrn/cr_rd.hpp"
#include "twrn/csv.hpp"
#include "twrn/errors.hpp"
#include "twrn/jscc.hpp"
#include "twrn/json_io.hpp"
#include "twrn/oracle.hpp"
#include "twrn/parallel.hpp"
#include "twrn/rd_solvers.hpp"
#include "verify_suite.hpp"

namespace twrn::cli {

namespace {

constexpr const char* kVersion = "0.1.0";

struct GlobalOpts {
  std::string config_path;
  std::optional<double> tol;
  std::optional<int> starts;
  std::optional<int> grid_k;
  std::optional<std::uint64_t> seed;
  int jobs = 0;
};

SolverConfig effective_config(const GlobalOpts& g) {
  SolverConfig cfg;
  if (!g.config_path.empty()) {
    std::ifstream in(g.config_path, std::ios::binary);
    if (!in) throw Error(ErrorCode::BadInputFile, "cannot open config " + g.config_path);
    std::ostringstream ss;
    ss << in.rdbuf();
    auto j = nlohmann::json::parse(ss.str(), nullptr, false);
    if (j.is_discarded())
      throw Error(ErrorCode::BadInputFile, "config file is not valid JSON");
    cfg.max_iters = j.value("max_iters", cfg.max_iters);
    cfg.tol = j.value("tol", cfg.tol);
    cfg.n_starts = j.value("n_starts", cfg.n_starts);
    cfg.grid_resolution = j.value("grid_resolution", cfg.grid_resolution);
    cfg.seed = j.value("seed", cfg.seed);
  }
  if (g.tol) cfg.tol = *g.tol;
  if (g.starts) cfg.n_starts = *g.starts;
  if (g.grid_k) cfg.grid_resolution = *g.grid_k;
  if (g.seed) cfg.seed = *g.seed;
  if (const char* env = std::getenv("TWRN_RD_SEED"))
    cfg.seed = std::strtoull(env, nullptr, 10);
  cfg.validate();
  return cfg;
}

void write_file(const std::string& path, const std::string& content) {
  auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::BadInputFile, "cannot write " + path);
  out << content;
}

void write_manifest(const std::string& out_path, const std::vector<std::string>& args,
                    const std::vector<std::string>& inputs, const SolverConfig& cfg,
                    double wall_seconds) {
  nlohmann::json j;
  std::string cmd = "twrn-rd";
  for (const auto& a : args) cmd += " " + a;
  j["command"] = cmd;
  j["inputs"] = inputs;
  j["output"] = out_path;
  j["tool_version"] = kVersion;
  j["wall_time_seconds"] = wall_seconds;
  j["config"] = {{"max_iters", cfg.max_iters},
                 {"tol", cfg.tol},
                 {"n_starts", cfg.n_starts},
                 {"grid_resolution", cfg.grid_resolution},
                 {"seed", cfg.seed}};
  write_file(out_path + ".manifest.json", j.dump(2) + "\n");
}

struct Emitter {
  const std::vector<std::string>& args;
  std::vector<std::string> inputs;
  SolverConfig cfg;
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

  void emit(const std::string& out_path, const std::string& content) const {
    if (out_path.empty()) return;
    write_file(out_path, content);
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(out_path, args, inputs, cfg, wall);
  }
};

std::vector<double> parse_grid(const std::string& spec) {
  // "start:step:stop" inclusive of stop up to fp slack
  double a, s, b;
  char c1, c2;
  std::istringstream ss(spec);
  if (!(ss >> a >> c1 >> s >> c2 >> b) || c1 != ':' || c2 != ':' || s <= 0.0)
    throw Error(ErrorCode::BadInputFile, "bad grid spec '" + spec + "', want start:step:stop");
  std::vector<double> g;
  for (double d = a; d <= b + 0.5 * s; d += s) g.push_back(std::min(d, b));
  return g;
}

int cmd_rd(const Emitter& em, const JointSource& src, const std::string& solver,
           double d1, double d2, const std::string& grid_spec, const std::string& out) {
  RdSolverId id;
  if (solver == "marginal-x") id = RdSolverId::MarginalX;
  else if (solver == "marginal-y") id = RdSolverId::MarginalY;
  else if (solver == "cond-x") id = RdSolverId::ConditionalX;
  else if (solver == "cond-y") id = RdSolverId::ConditionalY;
  else if (solver == "joint") id = RdSolverId::Joint;
  else throw Error(ErrorCode::UnknownCommand, "unknown solver '" + solver + "'");

  if (!grid_spec.empty()) {
    auto grid = parse_grid(grid_spec);
    auto curve = rd_curve(id, src, grid, em.cfg);
    std::string body = csv::curve_header();
    for (auto [d, r] : curve) body += csv::curve_row(d, r);
    em.emit(out, body);
    std::cout << "rd curve: " << curve.size() << " points";
    if (!out.empty()) std::cout << " -> " << out;
    std::cout << "\n";
    return 0;
  }

  RdResult res;
  switch (id) {
    case RdSolverId::MarginalX: res = marginal_rd(src.q_x(), src.delta1, d1, em.cfg); break;
    case RdSolverId::MarginalY: res = marginal_rd(src.q_y(), src.delta2, d2, em.cfg); break;
    case RdSolverId::ConditionalX: res = conditional_rd(src, 1, d1, em.cfg); break;
    case RdSolverId::ConditionalY: res = conditional_rd(src, 2, d2, em.cfg); break;
    case RdSolverId::Joint: res = joint_rd(src, d1, d2, em.cfg); break;
  }
  std::string body = "d1,d2,rate,converged,iterations,dual\n";
  body += csv::line({csv::format(d1), csv::format(d2), csv::format(res.rate),
                     res.converged ? "1" : "0", std::to_string(res.iterations),
                     csv::format(res.dual_value)});
  em.emit(out, body);
  std::cout << "rate = " << csv::format(res.rate) << " bits"
            << (res.converged ? "" : "  [NOT CONVERGED]") << "\n";
  return res.converged ? 0 : 3;
}

int cmd_bounds(const Emitter& em, const JointSource& src, double d1, double d2,
               const std::string& out) {
  auto b = bound_bundle(src, d1, d2, em.cfg);
  em.emit(out, csv::bundle_header() + csv::bundle_row(b));
  std::cout << "r_l=" << csv::format(b.r_l) << " r_u**=" << csv::format(b.r_u_dstar)
            << " r_u*=" << csv::format(b.r_u_star) << " r_u=" << csv::format(b.r_u);
  if (b.c_gap) std::cout << " c_gap=" << csv::format(*b.c_gap);
  std::cout << " ordering_ok=" << (b.ordering_ok ? "true" : "false") << "\n";
  bool all_conv = true;
  for (const auto& c : b.certificates) all_conv = all_conv && c.converged;
  return all_conv ? 0 : 3;
}

int cmd_cr(const Emitter& em, const JointSource& src, double d1, double d2,
           const std::string& out) {
  auto res = cr_rd(src, d1, d2, em.cfg);
  double rl = cut_set_lower(src, d1, d2, em.cfg);
  CrSweepRow row{d1, d2, res.rate, res.mi_x, res.mi_y, res.rate - rl,
                 res.rate - rl < 5.0 * em.cfg.tol};
  em.emit(out, csv::cr_header() + csv::cr_row(row));
  std::cout << "R_CR = " << csv::format(res.rate) << " bits (mi_x=" << csv::format(res.mi_x)
            << ", mi_y=" << csv::format(res.mi_y) << ", gap to R_L=" << csv::format(row.gap_to_rl)
            << ")" << (res.converged ? "" : "  [NOT CONVERGED]") << "\n";
  return res.converged ? 0 : 3;
}

int cmd_dsbs_figures(const Emitter& em, const std::vector<double>& rhos, double step,
                     const std::string& out_dir) {
  auto grid = dsbs::default_figure_grid(step);
  for (double rho : rhos) {
    auto table = dsbs::figure_curves(rho, grid);
    std::string body = csv::figure_header();
    for (const auto& row : table.rows) body += csv::figure_row(row);
    std::ostringstream name;
    name << out_dir << "/dsbs_rho_" << csv::format(rho) << ".csv";
    em.emit(name.str(), body);
    std::cout << "rho=" << csv::format(rho) << " d*=" << csv::format(table.d_star) << " -> "
              << name.str() << "\n";
  }
  return 0;
}

int cmd_gaussian(const Emitter& em, double sx2, double sy2, double rho, double d1,
                 double d2, const std::string& out) {
  gaussian::GaussianSpec spec;
  spec.sigma_x2 = sx2;
  spec.sigma_y2 = sy2;
  spec.rho = rho;
  double r1 = gaussian::conditional_rd(spec, 1, d1);
  double r2 = gaussian::conditional_rd(spec, 2, d2);
  double r = gaussian::region(spec, d1, d2);
  std::string body = "d1,d2,rate,r_x_given_y,r_y_given_x\n";
  body += csv::line({csv::format(d1), csv::format(d2), csv::format(r), csv::format(r1),
                     csv::format(r2)});
  em.emit(out, body);
  std::cout << "R(d1,d2) = " << csv::format(r) << " bits\n";
  return 0;
}

int cmd_jscc(const Emitter& em, const JointSource& src, BroadcastChannelSpec bc,
             double d1, double d2, std::optional<double> kappa, const std::string& check,
             const std::string& out) {
  if (kappa) {
    bc.kappa = *kappa;
    bc = validate_broadcast(std::move(bc));
  }
  FeasibilityVerdict v;
  if (check == "cut-set")
    v = jscc_cut_set_feasible(src, bc, d1, d2, em.cfg);
  else if (check == "cr")
    v = jscc_cr_achievable(src, bc, d1, d2, em.cfg);
  else if (check == "tuncel")
    v = tuncel_zero_distortion_feasible(src, bc, em.cfg);
  else
    throw Error(ErrorCode::UnknownCommand, "unknown check '" + check + "'");
  em.emit(out, verdict_to_json(v) + "\n");
  std::cout << check << ": " << verdict_name(v.verdict)
            << " (margins " << csv::format(v.margin_x) << ", " << csv::format(v.margin_y)
            << " bits; " << (v.exact ? "exact criterion" : "necessary condition only")
            << ")\n";
  return 0;
}

int cmd_oracle(const Emitter& em, const JointSource& src, const std::string& objective,
               double d1, double d2, std::size_t aux_card, std::uint64_t budget,
               const std::string& out) {
  oracle::GridSpec spec;
  spec.k = em.cfg.grid_resolution;
  spec.d1 = d1;
  spec.d2 = d2;
  spec.aux_card = aux_card;
  if (budget) spec.budget = budget;
  if (objective == "marginal-x") spec.objective = oracle::Objective::MarginalRdX;
  else if (objective == "marginal-y") spec.objective = oracle::Objective::MarginalRdY;
  else if (objective == "cond-x") spec.objective = oracle::Objective::ConditionalRdX;
  else if (objective == "cond-y") spec.objective = oracle::Objective::ConditionalRdY;
  else if (objective == "joint") spec.objective = oracle::Objective::JointRd;
  else if (objective == "cr") spec.objective = oracle::Objective::CrRd;
  else if (objective == "wz-x") spec.objective = oracle::Objective::WynerZivX;
  else if (objective == "wz-y") spec.objective = oracle::Objective::WynerZivY;
  else if (objective == "one-description") spec.objective = oracle::Objective::OneDescription;
  else if (objective == "heegard-berger") spec.objective = oracle::Objective::HeegardBerger;
  else throw Error(ErrorCode::UnknownCommand, "unknown objective '" + objective + "'");

  auto res = oracle::grid_min_channel(src, spec, em.cfg);
  nlohmann::json j;
  j["value_bits"] = res.value_bits;
  j["guaranteed_gap"] = res.guaranteed_gap;
  j["evaluations"] = res.evaluations;
  j["feasible_count"] = res.feasible_count;
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < res.argmin.probs.rows; ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t k = 0; k < res.argmin.probs.cols; ++k)
      row.push_back(res.argmin.probs(i, k));
    rows.push_back(row);
  }
  j["argmin"] = rows;
  em.emit(out, j.dump(2) + "\n");
  std::cout << "oracle " << objective << ": value=" << csv::format(res.value_bits)
            << " gap=" << csv::format(res.guaranteed_gap) << " over " << res.evaluations
            << " evaluations\n";
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"rate-distortion and joint source-channel analysis for two-way relay downlinks"};
  app.fallthrough();

  GlobalOpts g;
  double tol_v = 0.0;
  int starts_v = 0, grid_k_v = 0;
  std::uint64_t seed_v = 0;
  auto* tol_opt = app.add_option("--tol", tol_v, "solver tolerance in bits");
  auto* starts_opt = app.add_option("--starts", starts_v, "multi-start count");
  auto* grid_opt = app.add_option("--grid-k", grid_k_v, "oracle simplex resolution 1/k");
  auto* seed_opt = app.add_option("--seed", seed_v, "random seed");
  app.add_option("--jobs", g.jobs, "worker thread cap (0 = hardware)");
  app.add_option("--config", g.config_path, "JSON config mirroring the solver settings");

  std::string source_path, channel_path, out_path, solver = "cond-x", grid_spec;
  std::string check = "cut-set", objective = "marginal-x";
  double d1 = 0.0, d2 = 0.0, grid_step = 0.005;
  double sx2 = 1.0, sy2 = 1.0, rho_g = 0.0;
  double kappa_v = 0.0;
  std::vector<double> rhos;
  std::size_t aux_card = 0;
  std::uint64_t budget = 0;
  bool fast = false;

  auto* c_rd = app.add_subcommand("rd", "marginal / conditional / joint RD solves");
  c_rd->add_option("--source", source_path, "source JSON")->required();
  c_rd->add_option("--solver", solver, "marginal-x|marginal-y|cond-x|cond-y|joint");
  c_rd->add_option("--d1", d1, "distortion target for X");
  c_rd->add_option("--d2", d2, "distortion target for Y");
  c_rd->add_option("--grid", grid_spec, "sweep start:step:stop instead of a single solve");
  c_rd->add_option("--out", out_path, "output CSV path");

  auto* c_bounds = app.add_subcommand("bounds", "bound ladder at one distortion pair");
  c_bounds->add_option("--source", source_path)->required();
  c_bounds->add_option("--d1", d1)->required();
  c_bounds->add_option("--d2", d2)->required();
  c_bounds->add_option("--out", out_path);

  auto* c_cr = app.add_subcommand("cr", "common-reconstruction RD");
  c_cr->add_option("--source", source_path)->required();
  c_cr->add_option("--d1", d1)->required();
  c_cr->add_option("--d2", d2)->required();
  c_cr->add_option("--out", out_path);

  auto* c_fig = app.add_subcommand("dsbs-figures", "closed-form figure sweeps");
  c_fig->add_option("--rho", rhos, "crossover probability (repeatable)")->required();
  c_fig->add_option("--grid-step", grid_step, "distortion grid step");
  c_fig->add_option("--out", out_path, "output directory")->required();

  auto* c_gauss = app.add_subcommand("gaussian", "jointly Gaussian closed forms");
  c_gauss->add_option("--sigma-x2", sx2);
  c_gauss->add_option("--sigma-y2", sy2);
  c_gauss->add_option("--rho", rho_g);
  c_gauss->add_option("--d1", d1)->required();
  c_gauss->add_option("--d2", d2)->required();
  c_gauss->add_option("--out", out_path);

  auto* c_jscc = app.add_subcommand("jscc", "joint source-channel feasibility");
  c_jscc->add_option("--source", source_path)->required();
  c_jscc->add_option("--channel", channel_path, "broadcast channel JSON")->required();
  c_jscc->add_option("--d1", d1);
  c_jscc->add_option("--d2", d2);
  auto* kappa_opt = c_jscc->add_option("--kappa", kappa_v, "override the file's kappa");
  c_jscc->add_option("--check", check, "cut-set|cr|tuncel");
  c_jscc->add_option("--out", out_path);

  auto* c_verify = app.add_subcommand("verify", "invariant suite over bundled instances");
  c_verify->add_flag("--fast", fast, "reduced random-instance counts");

  auto* c_oracle = app.add_subcommand("oracle", "exhaustive grid search ground truth");
  c_oracle->add_option("--source", source_path)->required();
  c_oracle->add_option("--objective", objective,
                       "marginal-x|marginal-y|cond-x|cond-y|joint|cr|wz-x|wz-y|"
                       "one-description|heegard-berger");
  c_oracle->add_option("--d1", d1);
  c_oracle->add_option("--d2", d2);
  c_oracle->add_option("--aux-card", aux_card, "helper/description cardinality override");
  c_oracle->add_option("--budget", budget, "evaluation budget override");
  c_oracle->add_option("--out", out_path);

  app.require_subcommand(0, 1);

  std::vector<const char*> argv;
  argv.push_back("twrn-rd");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (app.get_subcommands().empty()) {
    std::cout << app.help();
    return 0;
  }

  try {
    if (tol_opt->count()) g.tol = tol_v;
    if (starts_opt->count()) g.starts = starts_v;
    if (grid_opt->count()) g.grid_k = grid_k_v;
    if (seed_opt->count()) g.seed = seed_v;
    set_max_jobs(g.jobs);

    Emitter em{args, {}, effective_config(g)};

    if (c_verify->parsed()) {
      int failures = run_verify_suite(fast, [](const std::string& line) {
        std::cout << line << "\n";
      });
      std::cout << (failures ? "verification FAILED\n" : "verification passed\n");
      return failures ? 1 : 0;
    }
    if (c_fig->parsed()) return cmd_dsbs_figures(em, rhos, grid_step, out_path);
    if (c_gauss->parsed()) return cmd_gaussian(em, sx2, sy2, rho_g, d1, d2, out_path);

    JointSource src = load_joint_source(source_path);
    em.inputs.push_back(source_path);

    if (c_rd->parsed()) {
      if (c_rd->count("--d2") == 0) d2 = d1;
      return cmd_rd(em, src, solver, d1, d2, grid_spec, out_path);
    }
    if (c_bounds->parsed()) return cmd_bounds(em, src, d1, d2, out_path);
    if (c_cr->parsed()) return cmd_cr(em, src, d1, d2, out_path);
    if (c_jscc->parsed()) {
      auto bc = load_broadcast_channel(channel_path);
      em.inputs.push_back(channel_path);
      std::optional<double> kap;
      if (kappa_opt->count()) kap = kappa_v;
      return cmd_jscc(em, src, std::move(bc), d1, d2, kap, check, out_path);
    }
    if (c_oracle->parsed())
      return cmd_oracle(em, src, objective, d1, d2, aux_card, budget, out_path);
  } catch (const Error& e) {
    std::cerr << "error (" << error_code_name(e.code()) << "): " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace twrn::cli
