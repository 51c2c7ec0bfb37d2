#pragma once

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "entnet/train.hpp"

namespace entnet {

// Configuration/schema violation; what() carries the offending field path.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LevelCfg {
  std::vector<int> n_cells_x;
  int n_cells_t = 0;
  std::vector<int> widths;  // empty: inherit
  long n_train = 0;         // 0: inherit
};

struct RunConfig {
  TrainConfig train;
  std::vector<LevelCfg> levels;  // convergence subcommand
  std::string output_dir = "out";
  bool plot = false;
};

// Validates against the shipped schema rules (schema/config.schema.json):
// required fields, types, ranges, and rejection of unknown keys. Throws
// ConfigError with a field-path message.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

// Fully resolved configuration (defaults substituted) for artifact embedding.
nlohmann::json resolved_config_json(const RunConfig& cfg);

}  // namespace entnet
