#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "entnet/grid.hpp"

namespace entnet {

namespace detail {
// Shared multilinear-interpolation loop so that streamed candidate scoring
// and DpwpFunction evaluation produce bitwise-identical values.
template <class CoeffFn>
inline double q1_interp(int axes, const std::array<double, kMaxDim + 1>& xi, CoeffFn&& coeff) {
  const int corners = 1 << axes;
  double v = 0.0;
  for (int a = 0; a < corners; ++a) {
    double w = 1.0;
    for (int ax = 0; ax < axes; ++ax) w *= ((a >> ax) & 1) ? xi[ax] : 1.0 - xi[ax];
    // Skipping zero-weight corners adds only +/-0.0 terms, so the result is
    // bit-identical while sparing the coefficient fetch.
    if (w != 0.0) v += w * coeff(a);
  }
  return v;
}
}  // namespace detail

// Discontinuous piecewise-multilinear function k_h in V_h: one coefficient
// per cell corner (Lagrange Q1), jumps allowed across faces. Immutable after
// construction.
class DpwpFunction {
 public:
  DpwpFunction(std::shared_ptr<const QuadGrid> grid, std::vector<double> coeffs);
  static DpwpFunction constant(std::shared_ptr<const QuadGrid> grid, double value);

  const QuadGrid& grid() const { return *grid_; }
  std::span<const double> coeffs() const { return coeffs_; }
  double corner(long cell, int corner) const {
    return coeffs_[cell * grid_->corners_per_cell() + corner];
  }

  // Multilinear interpolation in the cell given by cell_of (face tie-break
  // from the grid). Throws std::domain_error outside the domain closure.
  double eval(const Pt& z) const;
  double eval_in_cell(long cell, const std::array<double, kMaxDim + 1>& xi) const;

  // Mesh-dependent W_h^{1,inf} norm: max over cells of
  // (max corner |value| + h * max-norm of the multilinear gradient).
  double norm_w1inf() const;

 private:
  std::shared_ptr<const QuadGrid> grid_;
  std::vector<double> coeffs_;
};

struct PertConfig {
  double b = 5.0;
  int n_pert = 1;
  bool augment_constants = true;
  bool shared_across_cells = false;
  std::uint64_t seed = 1;
  double clip_c = 2.0;  // level of the constant candidates +/-c
};

// Per-cell average of a node-sampled field: trapezoid over the cell equals
// the mean of the corner samples when oversample = 1.
std::vector<double> cell_average(const QuadGrid& grid, std::span<const double> node_samples);

// Counter-based perturbation draw, keyed by (seed, iteration, candidate,
// cell, corner); uniform in [-b, b). shared_across_cells drops the cell key.
double pert_eps(const PertConfig& cfg, std::uint64_t iteration, int j, long cell, int corner);

// Candidates k_{h,j}|_K = Avg|_K + eps_j^alpha per corner. When
// augment_constants is set the list is extended with the constants +c and -c
// (in that order). Throws std::invalid_argument for b < 0 or n_pert < 1.
std::vector<DpwpFunction> sample_perturbations(std::shared_ptr<const QuadGrid> grid,
                                               std::span<const double> avgs,
                                               const PertConfig& cfg,
                                               std::uint64_t iteration);

// Rebuilds candidate #idx of the list sample_perturbations would return
// (idx >= n_pert addresses the augmented constants) without materializing the
// rest; identical coefficients by the keyed-draw construction.
DpwpFunction materialize_candidate(std::shared_ptr<const QuadGrid> grid,
                                   std::span<const double> avgs, const PertConfig& cfg,
                                   std::uint64_t iteration, int idx);

}  // namespace entnet
