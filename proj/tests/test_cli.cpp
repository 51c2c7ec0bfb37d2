#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace std::string_literals;
namespace fs = std::filesystem;

namespace {

std::string bin_path() {
  const char* p = std::getenv("ENTROPY_NET_BIN");
  REQUIRE_MESSAGE(p != nullptr, "ENTROPY_NET_BIN must point at the CLI binary");
  return p;
}

int run(const std::string& args, const std::string& log) {
  const std::string cmd = bin_path() + " " + args + " > " + log + " 2>&1";
  const int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), ("missing file: " + p.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path sandbox() {
  const fs::path dir = fs::temp_directory_path() / "entnet_cli_test";
  fs::create_directories(dir);
  return dir;
}

void write_tiny_config(const fs::path& path) {
  std::ofstream out(path);
  out << R"({
  "benchmark": "standing_shock",
  "mesh": {"n_cells_x": [16], "n_cells_t": 8},
  "net": {"widths": [2, 8, 8, 1], "init_seed": 3},
  "pert": {"b": 5, "n_pert": 8, "seed": 3},
  "train": {"n_train": 25, "n_strips": 1, "lr": 0.001},
  "metrics": {"refine": 2}
})";
}

}  // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("reruns and thread counts produce byte-identical artifacts") {
  const fs::path dir = sandbox();
  write_tiny_config(dir / "cfg.json");
  const std::string cfg = (dir / "cfg.json").string();

  REQUIRE(run("train --config "s + cfg + " --seed 7 --out " + (dir / "a").string(),
              (dir / "a.log").string()) == 0);
  REQUIRE(run("train --config "s + cfg + " --seed 7 --out " + (dir / "b").string(),
              (dir / "b.log").string()) == 0);
  REQUIRE(run("--threads 4 train --config "s + cfg + " --seed 7 --out " +
                  (dir / "c").string(),
              (dir / "c.log").string()) == 0);

  for (const char* f : {"history_strip0.csv", "checkpoint_strip0.json", "report.json"}) {
    const std::string a = slurp(dir / "a" / f);
    CHECK(a == slurp(dir / "b" / f));
    CHECK(a == slurp(dir / "c" / f));
  }
}

TEST_CASE("artifacts embed the resolved config and version hash") {
  const fs::path dir = sandbox();
  const std::string hist = slurp(dir / "a" / "history_strip0.csv");
  CHECK(hist.find("# config {") == 0);
  CHECK(hist.find("# version ") != std::string::npos);
  CHECK(hist.find("iteration,total,j_ent_star,l_reg,l_ibc_initial,l_ibc_boundary,"
                  "argmax_norm") != std::string::npos);
  const std::string report = slurp(dir / "a" / "report.json");
  CHECK(report.find("\"config\"") != std::string::npos);
  CHECK(report.find("\"e_r_final\"") != std::string::npos);
}

TEST_CASE("eval reproduces the training report from checkpoints") {
  const fs::path dir = sandbox();
  const std::string cfg = (dir / "cfg.json").string();
  REQUIRE(run("eval --config "s + cfg + " --checkpoint-dir " + (dir / "a").string() +
                  " --out " + (dir / "eval_report.json").string(),
              (dir / "eval.log").string()) == 0);
  const std::string train_report = slurp(dir / "a" / "report.json");
  const std::string eval_report = slurp(dir / "eval_report.json");
  // The config differs only through the seed override; the error values match.
  auto extract = [](const std::string& s, const std::string& key) {
    const auto pos = s.find(key);
    REQUIRE(pos != std::string::npos);
    return s.substr(pos, s.find(',', pos) - pos);
  };
  CHECK(extract(train_report, "\"e_r_final\"") == extract(eval_report, "\"e_r_final\""));
}

TEST_CASE("schema violations exit 1 with a field path") {
  const fs::path dir = sandbox();
  {
    std::ofstream out(dir / "bad.json");
    out << R"({"benchmark": "standing_shock", "mesh": {"n_cells_x": [16], "n_cells_t": 8, "typo_key": 1}})";
  }
  const int rc = run("train --config "s + (dir / "bad.json").string(),
                     (dir / "bad.log").string());
  CHECK(rc == 1);
  const std::string log = slurp(dir / "bad.log");
  CHECK(log.find("config.mesh.typo_key") != std::string::npos);

  {
    std::ofstream out(dir / "bad2.json");
    out << R"({"benchmark": "standing_shock", "pert": {"b": -2}})";
  }
  CHECK(run("train --config "s + (dir / "bad2.json").string(),
            (dir / "bad2.log").string()) == 1);
}

TEST_CASE("reference subcommand emits the cubic compound wave") {
  const fs::path dir = sandbox();
  REQUIRE(run("reference --benchmark cubic --cells 1024 --times 0.5 --out "s +
                  (dir / "ref").string(),
              (dir / "ref.log").string()) == 0);
  const fs::path csv = dir / "ref" / "reference_cubic_t0.5.csv";
  const std::string data = slurp(csv);
  CHECK(data.find("x,u") != std::string::npos);
  // Trailing-shock left state: u ~ 1.0 at x ~ 0 (shock sits near 0.125).
  std::istringstream in(data);
  std::string line;
  double best_x = 1e9, best_u = 0.0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line[0] == 'x') continue;
    const auto comma = line.find(',');
    const double x = std::stod(line.substr(0, comma));
    const double u = std::stod(line.substr(comma + 1));
    if (std::abs(x) < std::abs(best_x)) {
      best_x = x;
      best_u = u;
    }
  }
  CHECK(std::abs(best_x) < 2e-3);
  CHECK(best_u == doctest::Approx(1.0).epsilon(1e-2));
}

TEST_CASE("cpwl-verify emits trace and competitor tables") {
  const fs::path dir = sandbox();
  REQUIRE(run("cpwl-verify --case standing_shock --h 0.0625 --tol 0.001 --out "s +
                  (dir / "cpwl").string(),
              (dir / "cpwl.log").string()) == 0);
  const std::string trace = slurp(dir / "cpwl" / "hat_trace.csv");
  CHECK(trace.find("tau,sup_error,w11_error") != std::string::npos);
  const std::string comp = slurp(dir / "cpwl" / "competitor.csv");
  CHECK(comp.find("h,L_total,j_ent_star,l_reg,l_ibc_initial,l_ibc_boundary,argmax_norm") !=
        std::string::npos);
  std::istringstream in(comp);
  std::string line;
  int rows = 0;
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '#' && line[0] != 'h') ++rows;
  CHECK(rows == 1);
}

TEST_CASE("unknown subcommand fails") {
  const fs::path dir = sandbox();
  CHECK(run("frobnicate", (dir / "unk.log").string()) != 0);
}

TEST_SUITE_END();
