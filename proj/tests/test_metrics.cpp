#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "entnet/metrics.hpp"
#include "entnet/network.hpp"

using namespace entnet;

TEST_SUITE_BEGIN("metrics");

namespace {

AnalyticField wrap(const SpaceTimeFn& fn) {
  return AnalyticField(fn, [](const Pt&, double* g) { g[0] = g[1] = g[2] = 0.0; });
}

}  // namespace

TEST_CASE("relative errors against the exact solution") {
  const auto problem = make_problem("standing_shock");
  const QuadGrid eval_grid(problem.lo, problem.hi, problem.t_final, {64}, 32);

  const auto exact = wrap([&](const Pt& z) { return problem.exact(z); });
  const ErrorReport r0 = relative_errors(exact, problem, eval_grid);
  CHECK(r0.e_r_final == 0.0);
  CHECK(r0.e_r_spacetime == 0.0);
  CHECK(r0.reference_kind == "exact");

  // Zero field: |u| = 1 everywhere, so both errors are exactly 1.
  const auto zero = wrap([](const Pt&) { return 0.0; });
  const ErrorReport rz = relative_errors(zero, problem, eval_grid);
  CHECK(rz.e_r_final == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(rz.e_r_spacetime == doctest::Approx(1.0).epsilon(1e-13));

  // exact + 0.01: numerator 0.01 |Omega|, denominator int |u| = 2.
  const auto off = wrap([&](const Pt& z) { return problem.exact(z) + 0.01; });
  const ErrorReport ro = relative_errors(off, problem, eval_grid);
  CHECK(ro.e_r_final == doctest::Approx(0.01).epsilon(1e-12));
}

TEST_CASE("weno-referenced errors") {
  // The exact moving-shock solution measured against its own WENO reference
  // is small (the reference's discretization error only).
  auto problem = make_problem("moving_shock");
  problem.has_exact = false;  // force the WENO path
  const auto exact_fn = make_problem("moving_shock").exact;
  const auto field = wrap(exact_fn);
  const RefSolution ref = solve_reference_dense(problem, 1024, 0.4);
  const QuadGrid eval_grid(problem.lo, problem.hi, problem.t_final, {64}, 32);
  const ErrorReport r = relative_errors(field, problem, eval_grid, &ref);
  CHECK(r.reference_kind == "weno");
  CHECK(r.e_r_final < 0.05);
  CHECK(r.e_r_spacetime < 0.05);

  CHECK_THROWS_AS(relative_errors(field, problem, eval_grid), std::runtime_error);
}

TEST_CASE("zero reference norm is an error") {
  auto problem = make_problem("standing_shock");
  problem.exact = [](const Pt&) { return 0.0; };
  const QuadGrid eval_grid(problem.lo, problem.hi, problem.t_final, {16}, 8);
  const auto zero = wrap([](const Pt&) { return 0.0; });
  CHECK_THROWS_AS(relative_errors(zero, problem, eval_grid), std::runtime_error);
}

TEST_CASE("error is stable under evaluation-grid refinement") {
  const auto problem = make_problem("standing_shock");
  const auto net = init_network({2, 8, 8, 1}, 4.0, 13);
  NetField field(net);
  const QuadGrid g2(problem.lo, problem.hi, problem.t_final, {32}, 16);  // 2x of 16x8
  const QuadGrid g4(problem.lo, problem.hi, problem.t_final, {64}, 32);  // 4x
  const ErrorReport r2 = relative_errors(field, problem, g2);
  const ErrorReport r4 = relative_errors(field, problem, g4);
  CHECK(std::abs(r4.e_r_final - r2.e_r_final) / r2.e_r_final <= 0.10);
  CHECK(std::abs(r4.e_r_spacetime - r2.e_r_spacetime) / r2.e_r_spacetime <= 0.10);
}

TEST_CASE("log-log slope fit") {
  CHECK(fit_loglog_slope(std::vector<double>{1.0 / 16, 1.0 / 32},
                         std::vector<double>{0.1, 0.05}) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fit_loglog_slope(std::vector<double>{1.0 / 16, 1.0 / 32},
                         std::vector<double>{0.1, 0.1}) ==
        doctest::Approx(0.0).epsilon(1e-12));
  // Exact power law err = 3 h^p reproduces p.
  const double p = 1.37;
  std::vector<double> hs, es;
  for (double h : {0.5, 0.25, 0.125, 0.0625}) {
    hs.push_back(h);
    es.push_back(3.0 * std::pow(h, p));
  }
  CHECK(fit_loglog_slope(hs, es) == doctest::Approx(p).epsilon(1e-12));
  CHECK_THROWS_AS(fit_loglog_slope(std::vector<double>{0.1}, std::vector<double>{0.1}),
                  std::invalid_argument);
}

TEST_SUITE_END();
