#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "entnet/cpwl.hpp"
#include "entnet/train.hpp"
#include "entnet/weno.hpp"

namespace entnet {

// Build identity embedded in every artifact.
const char* version_string();
std::string version_hash();  // FNV-1a 64 of the version string, hex

// CSV writer: "# config <json>" and "# version <hash>" comment lines, a
// header row, then %.17g-formatted cells. Byte-identical for identical
// config + data.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const nlohmann::json& config,
            const std::vector<std::string>& columns);
  ~CsvWriter();
  void row(const std::vector<double>& values);
  void raw_row(const std::string& line);

 private:
  struct Impl;
  Impl* impl_;
};

std::string format_double(double v);

void write_history_csv(const std::string& path, const nlohmann::json& config,
                       const StripResult& strip);
void write_report_json(const std::string& path, const nlohmann::json& config,
                       const ErrorReport& report, const TrainResult* result);
void write_reference_csv(const std::string& path, const nlohmann::json& config,
                         const FvState& state);
void write_exact_csv(const std::string& path, const nlohmann::json& config,
                     const BenchmarkProblem& problem, int cells, double t);
void write_trace_csv(const std::string& path, const nlohmann::json& config,
                     const std::vector<CompileTraceRow>& trace);

ErrorReport read_report_json(const std::string& path);

}  // namespace entnet
