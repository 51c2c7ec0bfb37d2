#pragma once

#include <optional>
#include <string>
#include <vector>

#include "entnet/loss.hpp"
#include "entnet/weno.hpp"

namespace entnet {

struct ErrorReport {
  double e_r_final = 0.0;      // relative L1 error at t = T
  double e_r_spacetime = 0.0;  // relative space-time L1 error
  std::string reference_kind;  // "exact" | "weno"
  std::vector<int> eval_cells_x;
  int eval_cells_t = 0;
};

// Trapezoidal relative L1 errors against the closed form (when available) or
// a WENO reference (piecewise-constant in x, nearest snapshot in time).
// Throws std::runtime_error when the reference norm vanishes or when a WENO
// reference is needed but not supplied.
ErrorReport relative_errors(const Field& field, const BenchmarkProblem& problem,
                            const QuadGrid& eval_grid, const RefSolution* weno = nullptr);

// Least-squares slope of log(err) against log(h). Needs >= 2 points.
double fit_loglog_slope(std::span<const double> h, std::span<const double> err);

}  // namespace entnet
