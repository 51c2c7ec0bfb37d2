#pragma once

#include <functional>
#include <string>
#include <vector>

#include "entnet/flux.hpp"
#include "entnet/grid.hpp"

namespace entnet {

using SpaceTimeFn = std::function<double(const Pt&)>;

struct RefCfg {
  int n_cells = 4096;
  double cfl = 0.4;
};

// A benchmark Cauchy problem on a finite interval/box with either a closed
// form entropy solution or a WENO reference configuration.
struct BenchmarkProblem {
  std::string name;
  FluxModel flux;
  std::vector<double> lo, hi;  // spatial bounds
  double t_final = 0.5;
  SpaceTimeFn u0;              // initial data; evaluated with z[t] = 0
  SpaceTimeFn boundary_trace;  // exact lateral trace g
  bool has_exact = false;
  SpaceTimeFn exact;
  RefCfg ref_cfg;
  double u0_sup = 1.0;

  int dim() const { return static_cast<int>(lo.size()); }
  double default_clip() const { return 2.0 * (u0_sup + 1.0); }
};

// Catalog: standing_shock, moving_shock, rarefaction, two_shock, sine_wave,
// cubic, buckley_leverett, sine_flux, burgers2d.
BenchmarkProblem make_problem(const std::string& name);
std::vector<std::string> problem_names();

// The closed-form solution, with sub-case boundaries assigned to the
// left/earlier branch at equality. Throws std::invalid_argument when the
// problem has no closed form.
double exact_solution(const BenchmarkProblem& p, const Pt& z);

}  // namespace entnet
