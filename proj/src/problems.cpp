#include "entnet/problems.hpp"

#include <cmath>
#include <stdexcept>

namespace entnet {
namespace {

double exact_standing(const Pt& z) { return z[0] <= 0.0 ? 1.0 : -1.0; }

double exact_moving(const Pt& z) { return z[0] <= z[1] ? 2.0 : 0.0; }

double exact_rarefaction(const Pt& z) {
  const double x = z[0], t = z[1];
  if (t <= 0.0) return x <= 0.0 ? -1.0 : 1.0;
  if (x <= -t) return -1.0;
  if (x <= t) return x / t;
  return 1.0;
}

double exact_two_shock(const Pt& z) {
  const double x = z[0], t = z[1];
  if (t <= 1.0 / 3.0) {
    if (x <= 0.3 + 0.3 * t) return 0.8;
    if (x <= 0.7 - 0.9 * t) return -0.2;
    return -1.6;
  }
  return x <= 0.4 - 0.4 * (t - 1.0 / 3.0) ? 0.8 : -1.6;
}

double exact_burgers2d(const Pt& z) {
  const double x = z[0], y = z[1], t = z[2];
  if (x <= 0.5 - t) return y >= 0.5 + t ? 0.0 : 2.0;
  return y >= 1.0 - x ? -2.0 : 2.0;
}

BenchmarkProblem riemann1d(const std::string& name, const std::string& flux,
                           double lo, double hi, double T, double uL, double uR,
                           double x_jump = 0.0) {
  BenchmarkProblem p;
  p.name = name;
  p.flux = make_flux(flux);
  p.lo = {lo};
  p.hi = {hi};
  p.t_final = T;
  p.u0 = [uL, uR, x_jump](const Pt& z) { return z[0] < x_jump ? uL : uR; };
  p.u0_sup = std::max(std::abs(uL), std::abs(uR));
  // Far-field states; the waves stay inside the interval up to T.
  p.boundary_trace = [uL, uR, lo](const Pt& z) { return z[0] == lo ? uL : uR; };
  return p;
}

}  // namespace

BenchmarkProblem make_problem(const std::string& name) {
  if (name == "standing_shock") {
    BenchmarkProblem p;
    p.name = name;
    p.flux = make_flux("burgers1d");
    p.lo = {-1.0};
    p.hi = {1.0};
    p.t_final = 0.5;
    p.u0 = [](const Pt& z) { return z[0] <= 0.0 ? 1.0 : -1.0; };
    p.u0_sup = 1.0;
    p.has_exact = true;
    p.exact = exact_standing;
    p.boundary_trace = exact_standing;
    return p;
  }
  if (name == "moving_shock") {
    BenchmarkProblem p;
    p.name = name;
    p.flux = make_flux("burgers1d");
    p.lo = {-1.0};
    p.hi = {1.0};
    p.t_final = 0.5;
    p.u0 = [](const Pt& z) { return z[0] <= 0.0 ? 2.0 : 0.0; };
    p.u0_sup = 2.0;
    p.has_exact = true;
    p.exact = exact_moving;
    p.boundary_trace = exact_moving;
    return p;
  }
  if (name == "rarefaction") {
    BenchmarkProblem p;
    p.name = name;
    p.flux = make_flux("burgers1d");
    p.lo = {-1.0};
    p.hi = {1.0};
    p.t_final = 0.5;
    p.u0 = [](const Pt& z) { return z[0] <= 0.0 ? -1.0 : 1.0; };
    p.u0_sup = 1.0;
    p.has_exact = true;
    p.exact = exact_rarefaction;
    p.boundary_trace = exact_rarefaction;
    return p;
  }
  if (name == "two_shock") {
    BenchmarkProblem p;
    p.name = name;
    p.flux = make_flux("burgers1d");
    p.lo = {0.0};
    p.hi = {1.0};
    p.t_final = 0.5;
    p.u0 = [](const Pt& z) {
      if (z[0] <= 0.3) return 0.8;
      if (z[0] <= 0.7) return -0.2;
      return -1.6;
    };
    p.u0_sup = 1.6;
    p.has_exact = true;
    p.exact = exact_two_shock;
    p.boundary_trace = exact_two_shock;
    return p;
  }
  if (name == "sine_wave") {
    BenchmarkProblem p;
    p.name = name;
    p.flux = make_flux("burgers1d");
    p.lo = {-1.0};
    p.hi = {1.0};
    p.t_final = 1.0;
    p.u0 = [](const Pt& z) { return -std::sin(M_PI * z[0]); };
    p.u0_sup = 1.0;
    p.boundary_trace = [](const Pt&) { return 0.0; };  // zero Dirichlet data
    return p;
  }
  if (name == "cubic") return riemann1d(name, "cubic", -1.0, 1.0, 0.5, 1.0, -1.0);
  if (name == "buckley_leverett")
    return riemann1d(name, "buckley_leverett", -1.0, 1.0, 0.5, 1.0, 0.0);
  if (name == "sine_flux") return riemann1d(name, "sine_flux", -1.5, 1.5, 0.5, 0.5, 2.5);
  if (name == "burgers2d") {
    BenchmarkProblem p;
    p.name = name;
    p.flux = make_flux("burgers2d");
    p.lo = {0.0, 0.0};
    p.hi = {1.0, 1.0};
    p.t_final = 0.3;
    p.u0 = [](const Pt& z) {
      Pt z0 = z;
      z0[2] = 0.0;
      return exact_burgers2d(z0);
    };
    p.u0_sup = 2.0;
    p.has_exact = true;
    p.exact = exact_burgers2d;
    p.boundary_trace = exact_burgers2d;
    return p;
  }
  throw std::invalid_argument("unknown benchmark '" + name + "'");
}

std::vector<std::string> problem_names() {
  return {"standing_shock", "moving_shock", "rarefaction",      "two_shock", "sine_wave",
          "cubic",          "buckley_leverett", "sine_flux", "burgers2d"};
}

double exact_solution(const BenchmarkProblem& p, const Pt& z) {
  if (!p.has_exact)
    throw std::invalid_argument("benchmark '" + p.name + "' has no closed-form solution");
  return p.exact(z);
}

}  // namespace entnet
