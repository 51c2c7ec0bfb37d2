#include "entnet/dpwp.hpp"

#include <cmath>
#include <stdexcept>

#include "entnet/rng.hpp"

namespace entnet {

DpwpFunction::DpwpFunction(std::shared_ptr<const QuadGrid> grid, std::vector<double> coeffs)
    : grid_(std::move(grid)), coeffs_(std::move(coeffs)) {
  if (static_cast<long>(coeffs_.size()) != grid_->cell_count() * grid_->corners_per_cell())
    throw std::invalid_argument("dpwp: coefficient count mismatch");
}

DpwpFunction DpwpFunction::constant(std::shared_ptr<const QuadGrid> grid, double value) {
  std::vector<double> c(grid->cell_count() * grid->corners_per_cell(), value);
  return DpwpFunction(std::move(grid), std::move(c));
}

double DpwpFunction::eval_in_cell(long cell, const std::array<double, kMaxDim + 1>& xi) const {
  const double* c = coeffs_.data() + cell * grid_->corners_per_cell();
  return detail::q1_interp(grid_->axes(), xi, [c](int a) { return c[a]; });
}

double DpwpFunction::eval(const Pt& z) const {
  const CellIndex ci = grid_->cell_of(z);
  const long cell = grid_->cell_flat(ci);
  std::array<double, kMaxDim + 1> xi{};
  for (int a = 0; a < grid_->axes(); ++a) {
    const int i = a < grid_->dim() ? ci.ix[a] : ci.it;
    const double lo = grid_->axis_lo(a) + i * grid_->cell_spacing(a);
    double x = (z[a] - lo) / grid_->cell_spacing(a);
    xi[a] = x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x);
  }
  return eval_in_cell(cell, xi);
}

double DpwpFunction::norm_w1inf() const {
  const int corners = grid_->corners_per_cell();
  double worst = 0.0;
  for (long cell = 0; cell < grid_->cell_count(); ++cell) {
    const double* c = coeffs_.data() + cell * corners;
    double vmax = 0.0;
    for (int a = 0; a < corners; ++a) vmax = std::max(vmax, std::abs(c[a]));
    // The gradient of a multilinear function attains its max over the cell at
    // corners, so per-axis corner differences give the exact bound.
    double gmax = 0.0;
    for (int ax = 0; ax < grid_->axes(); ++ax) {
      const int bit = 1 << ax;
      for (int a = 0; a < corners; ++a) {
        if (a & bit) continue;
        const double diff = std::abs(c[a | bit] - c[a]) / grid_->cell_spacing(ax);
        gmax = std::max(gmax, diff);
      }
    }
    worst = std::max(worst, vmax + grid_->h() * gmax);
  }
  return worst;
}

std::vector<double> cell_average(const QuadGrid& grid, std::span<const double> node_samples) {
  if (static_cast<long>(node_samples.size()) != grid.node_count())
    throw std::invalid_argument("cell_average: sample/node count mismatch");
  const int q = grid.oversample();
  const int axes = grid.axes();
  std::vector<double> avgs(grid.cell_count());
  // Per-axis trapezoid coefficients over a cell, normalized to sum 1.
  std::vector<double> coef(q + 1, 1.0 / q);
  coef.front() = 0.5 / q;
  coef.back() = 0.5 / q;
  long offsets = 1;
  for (int a = 0; a < axes; ++a) offsets *= q + 1;
  for (long cell = 0; cell < grid.cell_count(); ++cell) {
    const CellIndex ci = grid.cell_unflat(cell);
    double acc = 0.0;
    for (long o = 0; o < offsets; ++o) {
      long rem = o;
      long node = 0;
      double w = 1.0;
      for (int a = 0; a < axes; ++a) {
        const int off = static_cast<int>(rem % (q + 1));
        rem /= q + 1;
        const int base = (a < grid.dim() ? ci.ix[a] : ci.it) * q;
        node = node * grid.nodes_on_axis(a) + base + off;
        w *= coef[off];
      }
      acc += w * node_samples[node];
    }
    avgs[cell] = acc;
  }
  return avgs;
}

double pert_eps(const PertConfig& cfg, std::uint64_t iteration, int j, long cell, int corner) {
  const std::uint64_t cell_key = cfg.shared_across_cells ? 0ull : static_cast<std::uint64_t>(cell);
  const std::uint64_t k = rng::key({cfg.seed, iteration, static_cast<std::uint64_t>(j),
                                    cell_key, static_cast<std::uint64_t>(corner)});
  return rng::uniform(k, -cfg.b, cfg.b);
}

std::vector<DpwpFunction> sample_perturbations(std::shared_ptr<const QuadGrid> grid,
                                               std::span<const double> avgs,
                                               const PertConfig& cfg,
                                               std::uint64_t iteration) {
  if (cfg.b < 0.0) throw std::invalid_argument("sample_perturbations: b must be >= 0");
  if (cfg.n_pert < 1) throw std::invalid_argument("sample_perturbations: n_pert must be >= 1");
  if (static_cast<long>(avgs.size()) != grid->cell_count())
    throw std::invalid_argument("sample_perturbations: average count mismatch");

  const int corners = grid->corners_per_cell();
  std::vector<DpwpFunction> out;
  out.reserve(cfg.n_pert + (cfg.augment_constants ? 2 : 0));
  for (int j = 0; j < cfg.n_pert; ++j) {
    std::vector<double> coeffs(grid->cell_count() * corners);
    for (long cell = 0; cell < grid->cell_count(); ++cell)
      for (int a = 0; a < corners; ++a)
        coeffs[cell * corners + a] = avgs[cell] + pert_eps(cfg, iteration, j, cell, a);
    out.emplace_back(grid, std::move(coeffs));
  }
  if (cfg.augment_constants) {
    out.push_back(DpwpFunction::constant(grid, cfg.clip_c));
    out.push_back(DpwpFunction::constant(grid, -cfg.clip_c));
  }
  return out;
}

DpwpFunction materialize_candidate(std::shared_ptr<const QuadGrid> grid,
                                   std::span<const double> avgs, const PertConfig& cfg,
                                   std::uint64_t iteration, int idx) {
  const int n_total = cfg.n_pert + (cfg.augment_constants ? 2 : 0);
  if (idx < 0 || idx >= n_total)
    throw std::out_of_range("materialize_candidate: candidate index");
  if (idx >= cfg.n_pert)
    return DpwpFunction::constant(std::move(grid),
                                  idx == cfg.n_pert ? cfg.clip_c : -cfg.clip_c);
  const int corners = grid->corners_per_cell();
  std::vector<double> coeffs(grid->cell_count() * corners);
  for (long cell = 0; cell < grid->cell_count(); ++cell)
    for (int a = 0; a < corners; ++a)
      coeffs[cell * corners + a] = avgs[cell] + pert_eps(cfg, iteration, idx, cell, a);
  return DpwpFunction(std::move(grid), std::move(coeffs));
}

}  // namespace entnet
