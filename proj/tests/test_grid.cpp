#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "entnet/dpwp.hpp"
#include "entnet/grid.hpp"
#include "entnet/rng.hpp"

using namespace entnet;

TEST_SUITE_BEGIN("grid");

TEST_CASE("construction and weights") {
  const QuadGrid g({-1.0}, {1.0}, 0.5, {2}, 1);
  CHECK(g.node_count() == 3 * 2);
  CHECK(g.cell_count() == 2);
  // corner weight = (dx/2)(dt/2) = 0.5 * 0.25
  CHECK(g.node_weight(0) == doctest::Approx(0.5 * 0.25).epsilon(1e-15));
  double wsum = 0.0;
  for (long n = 0; n < g.node_count(); ++n) wsum += g.node_weight(n);
  CHECK(wsum == doctest::Approx(1.0).epsilon(1e-12));  // |[-1,1] x [0,0.5]|
  CHECK(g.h() == doctest::Approx(std::sqrt(1.25)).epsilon(1e-15));
}

TEST_CASE("weight sum equals measure in 2D and with oversampling") {
  const QuadGrid g2({0.0, -1.0}, {2.0, 3.0}, 0.7, {3, 5}, 4);
  double wsum = 0.0;
  for (long n = 0; n < g2.node_count(); ++n) wsum += g2.node_weight(n);
  CHECK(wsum == doctest::Approx(2.0 * 4.0 * 0.7).epsilon(1e-12));

  const QuadGrid gq({-1.0}, {1.0}, 0.5, {4}, 2, 3);
  CHECK(gq.nodes_on_axis(0) == 13);
  double wq = 0.0;
  for (long n = 0; n < gq.node_count(); ++n) wq += gq.node_weight(n);
  CHECK(wq == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("integrate basics") {
  const QuadGrid g({-1.0}, {1.0}, 0.5, {8}, 4);
  std::vector<double> ones(g.node_count(), 1.0);
  CHECK(integrate(g, ones) == doctest::Approx(1.0).epsilon(1e-14));

  std::vector<double> xs(g.node_count());
  for (long n = 0; n < g.node_count(); ++n) xs[n] = g.node_point(n)[0];
  CHECK(std::abs(integrate(g, xs)) <= 1e-14);

  std::vector<double> bad(g.node_count() - 1, 0.0);
  CHECK_THROWS_AS(integrate(g, bad), std::invalid_argument);
}

TEST_CASE("trapezoid is exact for per-axis-linear integrands") {
  // f(x,t) = x t on [0,1]^2: closed form 1/4, for any cell counts.
  for (int nx : {1, 3, 7}) {
    for (int nt : {1, 4}) {
      const QuadGrid g({0.0}, {1.0}, 1.0, {nx}, nt);
      std::vector<double> s(g.node_count());
      for (long n = 0; n < g.node_count(); ++n) {
        const Pt z = g.node_point(n);
        s[n] = z[0] * z[1];
      }
      CHECK(integrate(g, s) == doctest::Approx(0.25).epsilon(1e-14));
    }
  }
}

TEST_CASE("exactness on random continuous Q1 fields vs closed form") {
  // Nodal data interpreted cell-wise multilinear: the exact integral is
  // sum over cells of |K| * (mean of corner values).
  const QuadGrid g({-1.0}, {1.0}, 0.5, {6}, 5);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> s(g.node_count());
    for (long n = 0; n < g.node_count(); ++n)
      s[n] = rng::uniform(rng::key({11u, static_cast<std::uint64_t>(trial),
                                    static_cast<std::uint64_t>(n)}),
                          -2.0, 2.0);
    double exact = 0.0;
    for (long c = 0; c < g.cell_count(); ++c) {
      double mean = 0.0;
      for (int a = 0; a < g.corners_per_cell(); ++a) mean += s[g.cell_corner_node(c, a)];
      exact += g.cell_volume() * mean / g.corners_per_cell();
    }
    CHECK(integrate(g, s) == doctest::Approx(exact).epsilon(1e-12));
  }
}

TEST_CASE("integrate is linear") {
  const QuadGrid g({0.0}, {1.0}, 1.0, {5}, 3);
  std::vector<double> s1(g.node_count()), s2(g.node_count());
  for (long n = 0; n < g.node_count(); ++n) {
    s1[n] = rng::uniform(rng::key({21u, static_cast<std::uint64_t>(n)}), -1.0, 1.0);
    s2[n] = rng::uniform(rng::key({22u, static_cast<std::uint64_t>(n)}), -1.0, 1.0);
  }
  const double a = 1.7, b = -0.4;
  std::vector<double> mix(g.node_count());
  for (long n = 0; n < g.node_count(); ++n) mix[n] = a * s1[n] + b * s2[n];
  CHECK(integrate(g, mix) ==
        doctest::Approx(a * integrate(g, s1) + b * integrate(g, s2)).epsilon(1e-12));
}

TEST_CASE("cell lookup conventions") {
  const QuadGrid g({-1.0}, {1.0}, 0.5, {2}, 2);
  // upper domain corner -> last cell (clamp rule)
  const CellIndex top = g.cell_of(Pt{1.0, 0.5, 0.0});
  CHECK(top.ix[0] == 1);
  CHECK(top.it == 1);
  // interior face x = 0 -> larger-index cell
  CHECK(g.cell_of(Pt{0.0, 0.1, 0.0}).ix[0] == 1);
  // strict interior of cell 0
  CHECK(g.cell_of(Pt{-0.7, 0.1, 0.0}).ix[0] == 0);
  CHECK_THROWS_AS(g.cell_of(Pt{1.5, 0.1, 0.0}), std::domain_error);
  CHECK_THROWS_AS(g.cell_of(Pt{0.0, -0.2, 0.0}), std::domain_error);
}

TEST_CASE("node owner mapping matches the face tie-break") {
  const QuadGrid g({-1.0}, {1.0}, 0.5, {4}, 3);
  for (long n = 0; n < g.node_count(); ++n) {
    const auto& ref = g.node_ref(n);
    const Pt z = g.node_point(n);
    CHECK(g.cell_flat(g.cell_of(z)) == ref.cell);
  }
}

TEST_CASE("boundary quadratures") {
  const QuadGrid g({-1.0}, {1.0}, 0.5, {8}, 4);
  double wi = 0.0;
  for (const auto& bn : g.initial_nodes()) {
    CHECK(bn.z[1] == 0.0);
    wi += bn.w;
  }
  CHECK(wi == doctest::Approx(2.0).epsilon(1e-14));
  double wl = 0.0;
  for (const auto& bn : g.lateral_nodes()) {
    CHECK((bn.z[0] == -1.0 || bn.z[0] == 1.0));
    wl += bn.w;
  }
  CHECK(wl == doctest::Approx(2.0 * 0.5).epsilon(1e-14));  // two sides x (0,T)
}

TEST_CASE("construction errors") {
  CHECK_THROWS_AS(QuadGrid({1.0}, {1.0}, 0.5, {2}, 1), std::invalid_argument);
  CHECK_THROWS_AS(QuadGrid({-1.0}, {1.0}, 0.0, {2}, 1), std::invalid_argument);
  CHECK_THROWS_AS(QuadGrid({-1.0}, {1.0}, 0.5, {0}, 1), std::invalid_argument);
  CHECK_THROWS_AS(QuadGrid({-1.0}, {1.0}, 0.5, {2}, 0), std::invalid_argument);
}

TEST_SUITE_END();
