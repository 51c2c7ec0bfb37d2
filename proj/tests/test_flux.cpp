#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "entnet/flux.hpp"

using namespace entnet;

TEST_SUITE_BEGIN("flux");

TEST_CASE("catalog values") {
  const FluxModel burgers = make_flux("burgers1d");
  CHECK(burgers.f(2.0, 0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(burgers.f_prime(2.0, 0) == doctest::Approx(2.0).epsilon(1e-14));

  const FluxModel sine = make_flux("sine_flux");
  CHECK(sine.f(0.5, 0) == doctest::Approx(1.0).epsilon(1e-14));

  // By the quotient rule on u^2 / (u^2 + (1-u)^2/2): D(1) = 1, D'(1) = 2,
  // f'(1) = (2*1*1 - 1*2)/1 = 0.
  const FluxModel bl = make_flux("buckley_leverett");
  CHECK(bl.f(1.0, 0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(bl.f_prime(1.0, 0) == doctest::Approx(0.0).epsilon(1e-14));

  const FluxModel cubic = make_flux("cubic");
  CHECK(cubic.f(-1.0, 0) == doctest::Approx(-1.0 / 3.0).epsilon(1e-14));

  const FluxModel b2 = make_flux("burgers2d");
  CHECK(b2.dim == 2);
  CHECK(b2.f(3.0, 0) == doctest::Approx(4.5));
  CHECK(b2.f(3.0, 1) == doctest::Approx(4.5));
}

TEST_CASE("derivatives match centered differences on [-3,3]") {
  const double fd_step = 1e-5;
  for (const auto& name : flux_catalog_names()) {
    const FluxModel m = make_flux(name);
    for (int i = 0; i < m.dim; ++i) {
      double worst1 = 0.0, worst2 = 0.0;
      for (double u = -3.0; u <= 3.0 + 1e-12; u += 0.01) {
        const double fd = (m.f(u + fd_step, i) - m.f(u - fd_step, i)) / (2.0 * fd_step);
        worst1 = std::max(worst1,
                          std::abs(m.f_prime(u, i) - fd) / (1.0 + std::abs(m.f_prime(u, i))));
        const double fd2 =
            (m.f_prime(u + fd_step, i) - m.f_prime(u - fd_step, i)) / (2.0 * fd_step);
        worst2 = std::max(worst2,
                          std::abs(m.f_second(u, i) - fd2) / (1.0 + std::abs(m.f_second(u, i))));
      }
      CAPTURE(name);
      CHECK(worst1 <= 1e-6);
      CHECK(worst2 <= 1e-6);
    }
  }
}

TEST_CASE("space-time flux") {
  const FluxModel burgers = make_flux("burgers1d");
  const auto F2 = eval_spacetime_flux(burgers, 2.0);
  CHECK(F2.size() == 2);
  CHECK(F2[0] == 2.0);
  CHECK(F2[1] == 2.0);
  const auto F0 = eval_spacetime_flux(burgers, 0.0);
  CHECK(F0[0] == 0.0);
  CHECK(F0[1] == 0.0);
  const auto Fc = eval_spacetime_flux(make_flux("cubic"), -1.0);
  CHECK(Fc[0] == doctest::Approx(-1.0 / 3.0).epsilon(1e-15));
  CHECK(Fc[1] == -1.0);

  // Last component equals the input exactly, for every catalog flux.
  for (const auto& name : flux_catalog_names()) {
    const FluxModel m = make_flux(name);
    for (double u : {-2.7, -0.3, 0.0, 1.9, 3.0})
      CHECK(eval_spacetime_flux(m, u).back() == u);
  }
}

TEST_CASE("buckley-leverett denominator never vanishes") {
  double min_d = 1e300;
  for (double u = -10.0; u <= 10.0; u += 1e-3)
    min_d = std::min(min_d, u * u + 0.5 * (1.0 - u) * (1.0 - u));
  CHECK(min_d == doctest::Approx(1.0 / 3.0).epsilon(1e-5));
  CHECK(min_d > 0.3);
}

TEST_CASE("unknown name and registration") {
  CHECK_THROWS_AS(make_flux("no_such_flux"), std::invalid_argument);
  FluxModel custom{"test_linear", 1, [](double u, int) { return 3.0 * u; },
                   [](double, int) { return 3.0; }, [](double, int) { return 0.0; }};
  register_flux(custom);
  CHECK(make_flux("test_linear").f(2.0, 0) == 6.0);
  FluxModel bad;
  CHECK_THROWS_AS(register_flux(bad), std::invalid_argument);
}

TEST_SUITE_END();
