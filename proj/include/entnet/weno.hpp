#pragma once

#include <array>
#include <vector>

#include "entnet/problems.hpp"

namespace entnet {

// Cell averages on a uniform 1D spatial grid at one time.
struct FvState {
  double time = 0.0;
  double x_lo = 0.0;
  double dx = 0.0;
  std::vector<double> u;

  double mass() const;
  double cell_center(int i) const { return x_lo + (i + 0.5) * dx; }
};

// Classic WENO5-JS left-biased reconstruction of the interface value at
// i+1/2 from the cell averages (v_{i-2}, ..., v_{i+2}).
double weno5_reconstruct(const std::array<double, 5>& stencil);

struct RefSolution {
  std::vector<FvState> snapshots;  // ascending times; front() is t = 0
  double boundary_flux_net = 0.0;  // time-integrated F_right - F_left
  double alpha = 0.0;              // global Lax-Friedrichs speed

  // Piecewise-constant in x at cell centers, nearest snapshot in time.
  double eval(double x, double t) const;
};

// Global Lax-Friedrichs flux splitting + WENO5 + SSP-RK3; Dirichlet ghost
// cells from the initial far-field states. Throws std::invalid_argument for
// bad n_cells/cfl, std::runtime_error for a degenerate flux (alpha = 0) or a
// detected blow-up (|u| exceeding 10x the initial data range).
RefSolution solve_reference(const BenchmarkProblem& problem, int n_cells, double cfl,
                            const std::vector<double>& out_times);

// Snapshots every t_final/100, as used by the metrics interpolation.
RefSolution solve_reference_dense(const BenchmarkProblem& problem, int n_cells, double cfl);

}  // namespace entnet
