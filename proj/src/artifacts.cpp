#include "entnet/artifacts.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace entnet {

const char* version_string() { return "entropy-net 0.1.0"; }

std::string version_hash() {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const char* p = version_string(); *p; ++p) {
    h ^= static_cast<unsigned char>(*p);
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct CsvWriter::Impl {
  std::ofstream out;
};

CsvWriter::CsvWriter(const std::string& path, const nlohmann::json& config,
                     const std::vector<std::string>& columns)
    : impl_(new Impl) {
  impl_->out.open(path);
  if (!impl_->out) {
    delete impl_;
    throw std::runtime_error("cannot open artifact for writing: " + path);
  }
  impl_->out << "# config " << config.dump() << "\n";
  impl_->out << "# version " << version_hash() << "\n";
  for (std::size_t i = 0; i < columns.size(); ++i)
    impl_->out << columns[i] << (i + 1 < columns.size() ? "," : "\n");
}

CsvWriter::~CsvWriter() { delete impl_; }

void CsvWriter::row(const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i)
    impl_->out << format_double(values[i]) << (i + 1 < values.size() ? "," : "\n");
}

void CsvWriter::raw_row(const std::string& line) { impl_->out << line << "\n"; }

void write_history_csv(const std::string& path, const nlohmann::json& config,
                       const StripResult& strip) {
  CsvWriter csv(path, config,
                {"iteration", "total", "j_ent_star", "l_reg", "l_ibc_initial",
                 "l_ibc_boundary", "argmax_norm"});
  for (const IterRecord& it : strip.history)
    csv.row({static_cast<double>(it.iteration), it.loss.total, it.loss.j_ent_star,
             it.loss.l_reg, it.loss.l_ibc_initial, it.loss.l_ibc_boundary,
             it.loss.argmax_norm});
}

void write_report_json(const std::string& path, const nlohmann::json& config,
                       const ErrorReport& report, const TrainResult* result) {
  nlohmann::json j;
  j["config"] = config;
  j["version"] = version_hash();
  j["e_r_final"] = report.e_r_final;
  j["e_r_spacetime"] = report.e_r_spacetime;
  j["reference_kind"] = report.reference_kind;
  j["eval_cells_x"] = report.eval_cells_x;
  j["eval_cells_t"] = report.eval_cells_t;
  if (result) {
    nlohmann::json strips = nlohmann::json::array();
    for (const auto& s : result->strips)
      strips.push_back({{"best_iteration", s.best_iteration},
                        {"best_total", s.best_loss.total},
                        {"t_lo", s.t_lo},
                        {"t_hi", s.t_hi}});
    j["strips"] = std::move(strips);
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open report for writing: " + path);
  out << j.dump(2) << "\n";
}

ErrorReport read_report_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open report: " + path);
  nlohmann::json j;
  in >> j;
  ErrorReport r;
  r.e_r_final = j.at("e_r_final").get<double>();
  r.e_r_spacetime = j.at("e_r_spacetime").get<double>();
  r.reference_kind = j.at("reference_kind").get<std::string>();
  return r;
}

void write_reference_csv(const std::string& path, const nlohmann::json& config,
                         const FvState& state) {
  CsvWriter csv(path, config, {"x", "u"});
  for (std::size_t i = 0; i < state.u.size(); ++i)
    csv.row({state.cell_center(static_cast<int>(i)), state.u[i]});
}

void write_exact_csv(const std::string& path, const nlohmann::json& config,
                     const BenchmarkProblem& problem, int cells, double t) {
  if (problem.dim() == 1) {
    CsvWriter csv(path, config, {"x", "u"});
    const double dx = (problem.hi[0] - problem.lo[0]) / cells;
    for (int i = 0; i < cells; ++i) {
      const double x = problem.lo[0] + (i + 0.5) * dx;
      csv.row({x, exact_solution(problem, Pt{x, t, 0.0})});
    }
    return;
  }
  CsvWriter csv(path, config, {"x", "y", "u"});
  const double dx = (problem.hi[0] - problem.lo[0]) / cells;
  const double dy = (problem.hi[1] - problem.lo[1]) / cells;
  for (int i = 0; i < cells; ++i)
    for (int k = 0; k < cells; ++k) {
      const double x = problem.lo[0] + (i + 0.5) * dx;
      const double y = problem.lo[1] + (k + 0.5) * dy;
      csv.row({x, y, exact_solution(problem, Pt{x, y, t})});
    }
}

void write_trace_csv(const std::string& path, const nlohmann::json& config,
                     const std::vector<CompileTraceRow>& trace) {
  CsvWriter csv(path, config, {"tau", "sup_error", "w11_error"});
  for (const auto& r : trace) csv.row({r.tau, r.sup_error, r.w11_error});
}

}  // namespace entnet
