#include "entnet/weno.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "entnet/parallel.hpp"

namespace entnet {
namespace {

constexpr double kWenoEps = 1e-6;
constexpr int kGhost = 3;

double weno5_core(double v0, double v1, double v2, double v3, double v4) {
  const double q0 = (2.0 * v0 - 7.0 * v1 + 11.0 * v2) / 6.0;
  const double q1 = (-v1 + 5.0 * v2 + 2.0 * v3) / 6.0;
  const double q2 = (2.0 * v2 + 5.0 * v3 - v4) / 6.0;
  const double b0 = 13.0 / 12.0 * (v0 - 2.0 * v1 + v2) * (v0 - 2.0 * v1 + v2) +
                    0.25 * (v0 - 4.0 * v1 + 3.0 * v2) * (v0 - 4.0 * v1 + 3.0 * v2);
  const double b1 = 13.0 / 12.0 * (v1 - 2.0 * v2 + v3) * (v1 - 2.0 * v2 + v3) +
                    0.25 * (v1 - v3) * (v1 - v3);
  const double b2 = 13.0 / 12.0 * (v2 - 2.0 * v3 + v4) * (v2 - 2.0 * v3 + v4) +
                    0.25 * (3.0 * v2 - 4.0 * v3 + v4) * (3.0 * v2 - 4.0 * v3 + v4);
  const double a0 = 0.1 / ((kWenoEps + b0) * (kWenoEps + b0));
  const double a1 = 0.6 / ((kWenoEps + b1) * (kWenoEps + b1));
  const double a2 = 0.3 / ((kWenoEps + b2) * (kWenoEps + b2));
  const double s = a0 + a1 + a2;
  return (a0 * q0 + a1 * q1 + a2 * q2) / s;
}

struct Stepper {
  const FluxModel* flux;
  double alpha;
  double dx;
  double uL, uR;  // far-field ghost states
  int n;
  std::vector<double> fp, fm, flux_iface, work;

  // Semi-discrete RHS: du_i/dt = -(F_{i+1/2} - F_{i-1/2}) / dx.
  // Returns (F at the left domain boundary, F at the right domain boundary).
  std::pair<double, double> rhs(const std::vector<double>& u, std::vector<double>& dudt) {
    const int ng = n + 2 * kGhost;
    fp.resize(ng);
    fm.resize(ng);
    for (int i = 0; i < ng; ++i) {
      const double ui = i < kGhost ? uL : (i >= n + kGhost ? uR : u[i - kGhost]);
      const double f = flux->f(ui, 0);
      fp[i] = 0.5 * (f + alpha * ui);
      fm[i] = 0.5 * (f - alpha * ui);
    }
    flux_iface.resize(n + 1);
    for (int i = 0; i <= n; ++i) {
      // interface i-1/2 of cell i; global index g = i + kGhost points at the cell
      // right of the interface.
      const int g = i + kGhost;
      const double left = weno5_core(fp[g - 3], fp[g - 2], fp[g - 1], fp[g], fp[g + 1]);
      const double right = weno5_core(fm[g + 2], fm[g + 1], fm[g], fm[g - 1], fm[g - 2]);
      flux_iface[i] = left + right;
    }
    dudt.resize(n);
    for (int i = 0; i < n; ++i) dudt[i] = -(flux_iface[i + 1] - flux_iface[i]) / dx;
    return {flux_iface[0], flux_iface[n]};
  }
};

}  // namespace

double FvState::mass() const {
  return dx * block_sum(u);
}

double weno5_reconstruct(const std::array<double, 5>& s) {
  return weno5_core(s[0], s[1], s[2], s[3], s[4]);
}

RefSolution solve_reference(const BenchmarkProblem& problem, int n_cells, double cfl,
                            const std::vector<double>& out_times) {
  if (problem.dim() != 1) throw std::invalid_argument("solve_reference: 1D problems only");
  if (n_cells < 16) throw std::invalid_argument("solve_reference: n_cells must be >= 16");
  if (!(cfl > 0.0) || cfl > 0.5)
    throw std::invalid_argument("solve_reference: cfl must be in (0, 0.5]");

  const double x_lo = problem.lo[0], x_hi = problem.hi[0];
  const double dx = (x_hi - x_lo) / n_cells;

  FvState state;
  state.time = 0.0;
  state.x_lo = x_lo;
  state.dx = dx;
  state.u.resize(n_cells);
  double umin = 0.0, umax = 0.0;
  for (int i = 0; i < n_cells; ++i) {
    Pt z{x_lo + (i + 0.5) * dx, 0.0, 0.0};
    state.u[i] = problem.u0(z);
    umin = i == 0 ? state.u[i] : std::min(umin, state.u[i]);
    umax = i == 0 ? state.u[i] : std::max(umax, state.u[i]);
  }

  // Global LF speed over the data range.
  double alpha = 0.0;
  for (int k = 0; k <= 2000; ++k) {
    const double u = umin + (umax - umin) * k / 2000.0;
    alpha = std::max(alpha, std::abs(problem.flux.f_prime(u, 0)));
  }
  if (alpha == 0.0) throw std::runtime_error("solve_reference: degenerate flux (alpha = 0)");
  const double blow_up = 10.0 * std::max({std::abs(umin), std::abs(umax), 1e-3});

  Stepper st;
  st.flux = &problem.flux;
  st.alpha = alpha;
  st.dx = dx;
  st.uL = problem.u0(Pt{x_lo, 0.0, 0.0});
  st.uR = problem.u0(Pt{x_hi, 0.0, 0.0});
  st.n = n_cells;

  std::vector<double> times = out_times;
  std::sort(times.begin(), times.end());

  RefSolution sol;
  sol.alpha = alpha;
  sol.snapshots.push_back(state);

  const double dt_base = cfl * dx / alpha;
  std::vector<double> k1, k2, k3, u1(n_cells), u2(n_cells);
  std::size_t next_out = 0;
  while (next_out < times.size() && times[next_out] <= state.time) ++next_out;

  while (next_out < times.size()) {
    const double target = times[next_out];
    double dt = std::min(dt_base, target - state.time);
    if (dt <= 0.0) {
      sol.snapshots.push_back(state);
      ++next_out;
      continue;
    }
    // SSP-RK3: u1 = u + dt L(u); u2 = 3/4 u + 1/4 (u1 + dt L(u1));
    // u_next = 1/3 u + 2/3 (u2 + dt L(u2)). Boundary fluxes accumulate with
    // the equivalent stage weights (1/6, 1/6, 2/3).
    auto [l0, r0] = st.rhs(state.u, k1);
    for (int i = 0; i < st.n; ++i) u1[i] = state.u[i] + dt * k1[i];
    auto [l1, r1] = st.rhs(u1, k2);
    for (int i = 0; i < st.n; ++i) u2[i] = 0.75 * state.u[i] + 0.25 * (u1[i] + dt * k2[i]);
    auto [l2, r2] = st.rhs(u2, k3);
    for (int i = 0; i < st.n; ++i)
      state.u[i] = state.u[i] / 3.0 + 2.0 / 3.0 * (u2[i] + dt * k3[i]);
    state.time += dt;
    sol.boundary_flux_net += dt * ((r0 - l0) / 6.0 + (r1 - l1) / 6.0 + 2.0 / 3.0 * (r2 - l2));

    double mx = 0.0;
    for (double v : state.u) mx = std::max(mx, std::abs(v));
    if (!(mx < blow_up))
      throw std::runtime_error("solve_reference: instability detected (CFL violation?)");

    if (state.time >= target - 1e-14 * std::max(1.0, target)) {
      state.time = target;
      sol.snapshots.push_back(state);
      ++next_out;
    }
  }
  return sol;
}

RefSolution solve_reference_dense(const BenchmarkProblem& problem, int n_cells, double cfl) {
  std::vector<double> times;
  for (int k = 1; k <= 100; ++k) times.push_back(problem.t_final * k / 100.0);
  return solve_reference(problem, n_cells, cfl, times);
}

double RefSolution::eval(double x, double t) const {
  if (snapshots.empty()) throw std::runtime_error("reference solution is empty");
  std::size_t best = 0;
  double best_dt = std::abs(snapshots[0].time - t);
  for (std::size_t i = 1; i < snapshots.size(); ++i) {
    const double d = std::abs(snapshots[i].time - t);
    if (d < best_dt) {
      best = i;
      best_dt = d;
    }
  }
  const FvState& s = snapshots[best];
  int i = static_cast<int>(std::floor((x - s.x_lo) / s.dx));
  i = std::clamp(i, 0, static_cast<int>(s.u.size()) - 1);
  return s.u[i];
}

}  // namespace entnet
