#include "entnet/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include "entnet/parallel.hpp"

namespace entnet {

ErrorReport relative_errors(const Field& field, const BenchmarkProblem& problem,
                            const QuadGrid& eval_grid, const RefSolution* weno) {
  if (!problem.has_exact && weno == nullptr)
    throw std::runtime_error("relative_errors: benchmark needs a WENO reference");
  auto ref = [&](const Pt& z) {
    if (problem.has_exact) return problem.exact(z);
    return weno->eval(z[0], z[eval_grid.dim()]);
  };

  double gbuf[kMaxDim + 1];
  // Final-time spatial slice: reuse the initial-plane weights at t = T.
  double num_T = 0.0, den_T = 0.0;
  {
    const auto& nodes = eval_grid.initial_nodes();
    num_T = block_sum_indexed(nodes.size(), [&](std::size_t i) {
      Pt z = nodes[i].z;
      z[eval_grid.dim()] = eval_grid.t_hi();
      double u;
      field.eval(z, u, gbuf);
      return nodes[i].w * std::abs(u - ref(z));
    });
    den_T = block_sum_indexed(nodes.size(), [&](std::size_t i) {
      Pt z = nodes[i].z;
      z[eval_grid.dim()] = eval_grid.t_hi();
      return nodes[i].w * std::abs(ref(z));
    });
  }
  double num = 0.0, den = 0.0;
  {
    const long n = eval_grid.node_count();
    num = block_sum_indexed(static_cast<std::size_t>(n), [&](std::size_t i) {
      const Pt z = eval_grid.node_point(static_cast<long>(i));
      double u;
      field.eval(z, u, gbuf);
      return eval_grid.node_weight(static_cast<long>(i)) * std::abs(u - ref(z));
    });
    den = block_sum_indexed(static_cast<std::size_t>(n), [&](std::size_t i) {
      const Pt z = eval_grid.node_point(static_cast<long>(i));
      return eval_grid.node_weight(static_cast<long>(i)) * std::abs(ref(z));
    });
  }
  if (!(den_T > 0.0) || !(den > 0.0))
    throw std::runtime_error("relative_errors: reference norm is zero");

  ErrorReport r;
  r.e_r_final = num_T / den_T;
  r.e_r_spacetime = num / den;
  r.reference_kind = problem.has_exact ? "exact" : "weno";
  for (int a = 0; a < eval_grid.dim(); ++a) r.eval_cells_x.push_back(eval_grid.cells(a));
  r.eval_cells_t = eval_grid.cells(eval_grid.dim());
  return r;
}

double fit_loglog_slope(std::span<const double> h, std::span<const double> err) {
  if (h.size() != err.size() || h.size() < 2)
    throw std::invalid_argument("fit_loglog_slope: need >= 2 points");
  const std::size_t n = h.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::log(h[i]), y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace entnet
