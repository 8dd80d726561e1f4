#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "twrn/closed_forms.hpp"
#include "twrn/json_io.hpp"

namespace fs = std::filesystem;
using namespace twrn;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("twrn_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

fs::path write_dsbs_source(const fs::path& dir) {
  auto p = dir / "dsbs25.json";
  std::ofstream out(p);
  out << joint_source_to_json(dsbs::make_source(0.25));
  return p;
}

fs::path write_bsc_channel(const fs::path& dir, double e1, double e2, double kappa) {
  auto p = dir / "channel.json";
  std::ofstream out(p);
  out << "{\"kappa\": " << kappa << ", \"q_uv_w\": [";
  for (int w = 0; w < 2; ++w) {
    out << (w ? ",[" : "[");
    for (int u = 0; u < 2; ++u) {
      out << (u ? ",[" : "[");
      for (int v = 0; v < 2; ++v) {
        double pu = (u == w) ? 1 - e1 : e1;
        double pv = (v == w) ? 1 - e2 : e2;
        out << (v ? "," : "") << pu * pv;
      }
      out << "]";
    }
    out << "]";
  }
  out << "]}";
  return p;
}

}  // namespace

TEST_CASE("help exits cleanly") {
  CHECK(cli::run({"--help"}) == 0);
  CHECK(cli::run({"rd", "--help"}) == 0);
  CHECK(cli::run({}) == 0);
}

TEST_CASE("unknown subcommand and bad files map to exit 2") {
  CHECK(cli::run({"frobnicate"}) == 2);
  CHECK(cli::run({"rd", "--source", "/nonexistent.json", "--d1", "0.1"}) == 2);

  TempDir tmp;
  auto bad = tmp.path / "bad.json";
  std::ofstream(bad) << "{\"q_xy\": [[0.6, 0.5], [0.0, 0.0]]}";
  CHECK(cli::run({"rd", "--source", bad.string(), "--d1", "0.1"}) == 2);
}

TEST_CASE("rd subcommand writes CSV plus manifest") {
  TempDir tmp;
  auto src = write_dsbs_source(tmp.path);
  auto out = tmp.path / "rd.csv";
  int rc = cli::run({"rd", "--source", src.string(), "--solver", "cond-x", "--d1", "0.1",
                     "--out", out.string()});
  CHECK(rc == 0);
  auto text = slurp(out);
  CHECK(text.find("d1,d2,rate") == 0);
  CHECK(text.find("0.342282") != std::string::npos);
  CHECK(fs::exists(out.string() + ".manifest.json"));
  auto manifest = slurp(out.string() + ".manifest.json");
  CHECK(manifest.find("\"tool_version\"") != std::string::npos);
}

TEST_CASE("rd curve sweep") {
  TempDir tmp;
  auto src = write_dsbs_source(tmp.path);
  auto out = tmp.path / "curve.csv";
  int rc = cli::run({"rd", "--source", src.string(), "--solver", "cond-x", "--grid",
                     "0:0.05:0.25", "--out", out.string()});
  CHECK(rc == 0);
  auto text = slurp(out);
  CHECK(text.find("d,rate\n") == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 7);  // header + 6 points
}

TEST_CASE("identical seeds give byte-identical output") {
  TempDir tmp;
  auto src = write_dsbs_source(tmp.path);
  auto out1 = tmp.path / "a.csv";
  auto out2 = tmp.path / "b.csv";
  CHECK(cli::run({"cr", "--source", src.string(), "--d1", "0.1", "--d2", "0.1", "--seed",
                  "7", "--out", out1.string()}) == 0);
  CHECK(cli::run({"cr", "--source", src.string(), "--d1", "0.1", "--d2", "0.1", "--seed",
                  "7", "--out", out2.string()}) == 0);
  CHECK(slurp(out1) == slurp(out2));
}

TEST_CASE("dsbs-figures emits one CSV per rho") {
  TempDir tmp;
  auto dir = tmp.path / "figs";
  int rc = cli::run({"dsbs-figures", "--rho", "0.15", "--rho", "0.3", "--grid-step",
                     "0.05", "--out", dir.string()});
  CHECK(rc == 0);
  CHECK(fs::exists(dir / "dsbs_rho_0.15.csv"));
  CHECK(fs::exists(dir / "dsbs_rho_0.3.csv"));
  auto text = slurp(dir / "dsbs_rho_0.15.csv");
  CHECK(text.find("d,r,cr_upper,is_past_dstar\n") == 0);
}

TEST_CASE("gaussian subcommand") {
  TempDir tmp;
  auto out = tmp.path / "g.csv";
  int rc = cli::run({"gaussian", "--sigma-x2", "1", "--sigma-y2", "1", "--rho", "0.5",
                     "--d1", "0.25", "--d2", "0.75", "--out", out.string()});
  CHECK(rc == 0);
  CHECK(slurp(out).find("0.79248125") != std::string::npos);
}

TEST_CASE("jscc subcommand verdicts") {
  TempDir tmp;
  auto src = write_dsbs_source(tmp.path);
  auto ch = write_bsc_channel(tmp.path, 0.1, 0.2, 2.0);
  auto out = tmp.path / "verdict.json";
  int rc = cli::run({"jscc", "--source", src.string(), "--channel", ch.string(), "--d1",
                     "0", "--d2", "0", "--check", "tuncel", "--out", out.string()});
  CHECK(rc == 0);
  CHECK(slurp(out).find("\"infeasible\"") != std::string::npos);

  rc = cli::run({"jscc", "--source", src.string(), "--channel", ch.string(), "--d1", "0",
                 "--d2", "0", "--check", "tuncel", "--kappa", "3", "--out", out.string()});
  CHECK(rc == 0);
  CHECK(slurp(out).find("\"feasible\"") != std::string::npos);
}

TEST_CASE("oracle subcommand") {
  TempDir tmp;
  auto src = write_dsbs_source(tmp.path);
  auto out = tmp.path / "oracle.json";
  int rc = cli::run({"oracle", "--source", src.string(), "--objective", "marginal-x",
                     "--d1", "0.1", "--grid-k", "50", "--out", out.string()});
  CHECK(rc == 0);
  CHECK(slurp(out).find("value_bits") != std::string::npos);
}

TEST_CASE("verify --fast passes on the bundled instances") {
  CHECK(cli::run({"verify", "--fast"}) == 0);
}
