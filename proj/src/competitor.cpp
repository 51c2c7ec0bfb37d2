#include <cmath>
#include <stdexcept>

#include "entnet/cpwl.hpp"

namespace entnet {

// eps = h^2 strip around the shock line x = gamma0 + gamma_slope * t, sheared
// tensor triangulation: tangential length O(h), normal thickness eps inside
// the strip, shape-regular O(h) cells outside, one-sided exact states as
// nodal values.
CpwlFunction build_shock_competitor(const BenchmarkProblem& problem, double h) {
  double gamma0, gamma_slope, u_left, u_right;
  if (problem.name == "standing_shock") {
    gamma0 = 0.0;
    gamma_slope = 0.0;
    u_left = 1.0;
    u_right = -1.0;
  } else if (problem.name == "moving_shock") {
    gamma0 = 0.0;
    gamma_slope = 1.0;
    u_left = 2.0;
    u_right = 0.0;
  } else {
    throw std::invalid_argument(
        "build_shock_competitor: requires a 1D single-shock Riemann benchmark");
  }
  if (!(h > 0.0)) throw std::invalid_argument("build_shock_competitor: h must be positive");

  const double lo = problem.lo[0], hi = problem.hi[0], T = problem.t_final;
  const double eps = h * h;

  // The strip must stay clear of the lateral boundaries for all t in [0, T].
  const double g_min = std::min(gamma0, gamma0 + gamma_slope * T);
  const double g_max = std::max(gamma0, gamma0 + gamma_slope * T);
  if (g_min - eps / 2.0 - h <= lo || g_max + eps / 2.0 + h >= hi)
    throw std::invalid_argument("build_shock_competitor: h too large for the strip to fit");

  // Shock-relative breakpoints xi = x - gamma(t); row j is sheared by
  // gamma(t_j) so the mesh covers [lo, hi] at every row.
  const double xi_min = lo - g_max;
  const double xi_max = hi - g_min;
  std::vector<double> xs;
  const int n_left = std::max(1, static_cast<int>(std::ceil((-eps / 2.0 - xi_min) / h)));
  for (int i = 0; i < n_left; ++i)
    xs.push_back(xi_min + (-eps / 2.0 - xi_min) * i / n_left);
  xs.push_back(-eps / 2.0);
  xs.push_back(eps / 2.0);
  const int n_right = std::max(1, static_cast<int>(std::ceil((xi_max - eps / 2.0) / h)));
  for (int i = 1; i <= n_right; ++i)
    xs.push_back(eps / 2.0 + (xi_max - eps / 2.0) * i / n_right);

  const int n_t = std::max(1, static_cast<int>(std::ceil(T / h)));
  std::vector<double> ts(n_t + 1);
  for (int j = 0; j <= n_t; ++j) ts[j] = T * j / n_t;
  std::vector<double> shift(n_t + 1);
  for (int j = 0; j <= n_t; ++j) shift[j] = gamma0 + gamma_slope * ts[j];

  auto mesh = std::make_shared<SimplicialMesh>(make_tensor_tri_mesh(xs, ts, shift));

  const int nx = static_cast<int>(xs.size());
  std::vector<double> nodal(mesh->vertex_count());
  for (int j = 0; j <= n_t; ++j)
    for (int i = 0; i < nx; ++i)
      nodal[j * nx + i] = xs[i] <= -eps / 2.0 ? u_left
                          : (xs[i] >= eps / 2.0 ? u_right
                                                : 0.5 * (u_left + u_right));
  return CpwlFunction(std::move(mesh), std::move(nodal));
}

}  // namespace entnet
