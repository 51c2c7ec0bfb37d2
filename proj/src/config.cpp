#include "entnet/config.hpp"

#include <fstream>
#include <set>

namespace entnet {
namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::string& path,
                    const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError(path + ": expected an object");
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key)) throw ConfigError(path + "." + key + ": unknown key");
}

template <class T>
T get_field(const json& j, const std::string& path, const std::string& key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(path + "." + key + ": wrong type");
  }
}

template <class T>
T require_field(const json& j, const std::string& path, const std::string& key) {
  if (!j.contains(key)) throw ConfigError(path + "." + key + ": missing required field");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(path + "." + key + ": wrong type");
  }
}

void check(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

}  // namespace

RunConfig parse_config(const json& j) {
  RunConfig out;
  reject_unknown(j, "config",
                 {"benchmark", "mesh", "net", "pert", "train", "metrics", "reference",
                  "levels", "output_dir", "plot"});
  TrainConfig& t = out.train;
  t.benchmark = require_field<std::string>(j, "config", "benchmark");
  make_problem(t.benchmark);  // catalog check; throws std::invalid_argument

  if (j.contains("mesh")) {
    const json& m = j.at("mesh");
    reject_unknown(m, "config.mesh", {"n_cells_x", "n_cells_t", "oversample"});
    t.n_cells_x = require_field<std::vector<int>>(m, "config.mesh", "n_cells_x");
    t.n_cells_t = require_field<int>(m, "config.mesh", "n_cells_t");
    t.oversample = get_field<int>(m, "config.mesh", "oversample", 1);
    for (int n : t.n_cells_x) check(n >= 1, "config.mesh.n_cells_x: counts must be >= 1");
    check(t.n_cells_t >= 1, "config.mesh.n_cells_t: must be >= 1");
    check(t.oversample >= 1, "config.mesh.oversample: must be >= 1");
  }
  if (j.contains("net")) {
    const json& n = j.at("net");
    reject_unknown(n, "config.net", {"widths", "c", "init_seed"});
    t.widths = get_field<std::vector<int>>(n, "config.net", "widths", {});
    t.clip_c = get_field<double>(n, "config.net", "c", 0.0);
    t.init_seed = get_field<std::uint64_t>(n, "config.net", "init_seed", 1);
    for (int w : t.widths) check(w >= 1, "config.net.widths: widths must be >= 1");
    check(t.clip_c >= 0.0, "config.net.c: must be >= 0");
  }
  if (j.contains("pert")) {
    const json& p = j.at("pert");
    reject_unknown(p, "config.pert",
                   {"b", "n_pert", "augment_constants", "shared_across_cells", "seed"});
    t.pert_b = get_field<double>(p, "config.pert", "b", 5.0);
    t.n_pert = get_field<int>(p, "config.pert", "n_pert", 512);
    t.augment_constants = get_field<bool>(p, "config.pert", "augment_constants", true);
    t.shared_across_cells = get_field<bool>(p, "config.pert", "shared_across_cells", false);
    t.pert_seed = get_field<std::uint64_t>(p, "config.pert", "seed", 1);
    check(t.pert_b >= 0.0, "config.pert.b: must be >= 0");
    check(t.n_pert >= 1, "config.pert.n_pert: must be >= 1");
  }
  if (j.contains("train")) {
    const json& tr = j.at("train");
    reject_unknown(tr, "config.train", {"n_train", "n_strips", "lr"});
    t.n_train = get_field<long>(tr, "config.train", "n_train", 10000);
    t.n_strips = get_field<int>(tr, "config.train", "n_strips", 1);
    t.lr = get_field<double>(tr, "config.train", "lr", 1e-3);
    check(t.n_train >= 1, "config.train.n_train: must be >= 1");
    check(t.n_strips >= 1, "config.train.n_strips: must be >= 1");
    check(t.lr > 0.0, "config.train.lr: must be > 0");
  }
  if (j.contains("metrics")) {
    const json& m = j.at("metrics");
    reject_unknown(m, "config.metrics", {"refine"});
    t.metrics_refine = get_field<int>(m, "config.metrics", "refine", 4);
    check(t.metrics_refine >= 1, "config.metrics.refine: must be >= 1");
  }
  if (j.contains("reference")) {
    const json& r = j.at("reference");
    reject_unknown(r, "config.reference", {"n_cells", "cfl"});
    t.reference.n_cells = get_field<int>(r, "config.reference", "n_cells", 4096);
    t.reference.cfl = get_field<double>(r, "config.reference", "cfl", 0.4);
    check(t.reference.n_cells >= 16, "config.reference.n_cells: must be >= 16");
    check(t.reference.cfl > 0.0 && t.reference.cfl <= 0.5,
          "config.reference.cfl: must be in (0, 0.5]");
  }
  if (j.contains("levels")) {
    if (!j.at("levels").is_array()) throw ConfigError("config.levels: expected an array");
    int idx = 0;
    for (const json& l : j.at("levels")) {
      const std::string path = "config.levels[" + std::to_string(idx) + "]";
      reject_unknown(l, path, {"n_cells_x", "n_cells_t", "widths", "n_train"});
      LevelCfg lvl;
      lvl.n_cells_x = require_field<std::vector<int>>(l, path, "n_cells_x");
      lvl.n_cells_t = require_field<int>(l, path, "n_cells_t");
      lvl.widths = get_field<std::vector<int>>(l, path, "widths", {});
      lvl.n_train = get_field<long>(l, path, "n_train", 0);
      for (int n : lvl.n_cells_x) check(n >= 1, path + ".n_cells_x: counts must be >= 1");
      check(lvl.n_cells_t >= 1, path + ".n_cells_t: must be >= 1");
      out.levels.push_back(std::move(lvl));
      ++idx;
    }
  }
  out.output_dir = get_field<std::string>(j, "config", "output_dir", "out");
  out.plot = get_field<bool>(j, "config", "plot", false);

  const BenchmarkProblem p = make_problem(t.benchmark);
  check(static_cast<int>(t.n_cells_x.size()) == p.dim(),
        "config.mesh.n_cells_x: needs one count per spatial dimension of '" +
            t.benchmark + "'");
  if (!t.widths.empty()) {
    check(t.widths.front() == p.dim() + 1,
          "config.net.widths: input width must equal d+1 = " + std::to_string(p.dim() + 1));
    check(t.widths.back() == 1, "config.net.widths: output width must be 1");
  }
  return out;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config parse error: " + std::string(e.what()));
  }
  return parse_config(j);
}

nlohmann::json resolved_config_json(const RunConfig& cfg) {
  const TrainConfig& t = cfg.train;
  const BenchmarkProblem p = make_problem(t.benchmark);
  json j;
  j["benchmark"] = t.benchmark;
  j["mesh"] = {{"n_cells_x", t.n_cells_x},
               {"n_cells_t", t.n_cells_t},
               {"oversample", t.oversample}};
  std::vector<int> widths = t.widths;
  if (widths.empty()) widths = {p.dim() + 1, 64, 64, 64, 64, 1};
  j["net"] = {{"widths", widths},
              {"c", t.clip_c > 0.0 ? t.clip_c : p.default_clip()},
              {"init_seed", t.init_seed}};
  j["pert"] = {{"b", t.pert_b},
               {"n_pert", t.n_pert},
               {"augment_constants", t.augment_constants},
               {"shared_across_cells", t.shared_across_cells},
               {"seed", t.pert_seed}};
  j["train"] = {{"n_train", t.n_train}, {"n_strips", t.n_strips}, {"lr", t.lr}};
  j["metrics"] = {{"refine", t.metrics_refine}};
  j["reference"] = {{"n_cells", t.reference.n_cells}, {"cfl", t.reference.cfl}};
  if (!cfg.levels.empty()) {
    json levels = json::array();
    for (const auto& l : cfg.levels) {
      json jl = {{"n_cells_x", l.n_cells_x}, {"n_cells_t", l.n_cells_t}};
      if (!l.widths.empty()) jl["widths"] = l.widths;
      if (l.n_train > 0) jl["n_train"] = l.n_train;
      levels.push_back(std::move(jl));
    }
    j["levels"] = std::move(levels);
  }
  // output_dir/plot steer artifact placement only; identical computations
  // must embed identical configs.
  return j;
}

}  // namespace entnet
