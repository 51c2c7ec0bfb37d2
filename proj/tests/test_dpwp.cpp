#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <memory>

#include "entnet/dpwp.hpp"
#include "entnet/rng.hpp"

using namespace entnet;

namespace {

std::shared_ptr<const QuadGrid> small_grid() {
  return std::make_shared<const QuadGrid>(std::vector<double>{-1.0},
                                          std::vector<double>{1.0}, 0.5,
                                          std::vector<int>{4}, 2);
}

}  // namespace

TEST_SUITE_BEGIN("dpwp");

TEST_CASE("cell averages") {
  auto g = small_grid();
  std::vector<double> threes(g->node_count(), 3.0);
  for (double a : cell_average(*g, threes)) CHECK(a == 3.0);

  // u = x on the unit cell: mean of corners 0,0,1,1 = 0.5.
  QuadGrid unit({0.0}, {1.0}, 1.0, {1}, 1);
  std::vector<double> xs(unit.node_count());
  for (long n = 0; n < unit.node_count(); ++n) xs[n] = unit.node_point(n)[0];
  CHECK(cell_average(unit, xs)[0] == doctest::Approx(0.5).epsilon(1e-15));

  // Random continuous Q1 data: the corner mean equals the exact cell
  // integral divided by |K| (multilinear closed form).
  std::vector<double> s(g->node_count());
  for (long n = 0; n < g->node_count(); ++n)
    s[n] = rng::uniform(rng::key({31u, static_cast<std::uint64_t>(n)}), -1.0, 1.0);
  const auto avgs = cell_average(*g, s);
  for (long c = 0; c < g->cell_count(); ++c) {
    double mean = 0.0;
    for (int a = 0; a < g->corners_per_cell(); ++a) mean += s[g->cell_corner_node(c, a)];
    mean /= g->corners_per_cell();
    CHECK(avgs[c] == doctest::Approx(mean).epsilon(1e-14));
  }
}

TEST_CASE("b = 0 reproduces the average; augmentation appends constants") {
  auto g = small_grid();
  std::vector<double> avgs(g->cell_count());
  for (long c = 0; c < g->cell_count(); ++c) avgs[c] = 0.1 * c;

  PertConfig cfg;
  cfg.b = 0.0;
  cfg.n_pert = 1;
  cfg.augment_constants = false;
  const auto plain = sample_perturbations(g, avgs, cfg, 1);
  REQUIRE(plain.size() == 1);
  for (long c = 0; c < g->cell_count(); ++c)
    for (int a = 0; a < g->corners_per_cell(); ++a)
      CHECK(plain[0].corner(c, a) == avgs[c]);

  cfg.b = 5.0;
  cfg.n_pert = 2;
  cfg.augment_constants = true;
  cfg.clip_c = 4.0;
  const auto aug = sample_perturbations(g, avgs, cfg, 1);
  REQUIRE(aug.size() == 4);
  for (long c = 0; c < g->cell_count(); ++c)
    for (int a = 0; a < g->corners_per_cell(); ++a) {
      CHECK(aug[2].corner(c, a) == 4.0);
      CHECK(aug[3].corner(c, a) == -4.0);
    }
}

TEST_CASE("determinism and the deviation bound") {
  auto g = small_grid();
  std::vector<double> avgs(g->cell_count(), 0.25);
  PertConfig cfg;
  cfg.b = 5.0;
  cfg.n_pert = 2;
  cfg.seed = 42;
  const auto run1 = sample_perturbations(g, avgs, cfg, 7);
  const auto run2 = sample_perturbations(g, avgs, cfg, 7);
  REQUIRE(run1.size() == run2.size());
  for (std::size_t j = 0; j < run1.size(); ++j)
    for (long c = 0; c < g->cell_count(); ++c)
      for (int a = 0; a < g->corners_per_cell(); ++a) {
        CHECK(run1[j].corner(c, a) == run2[j].corner(c, a));
        CHECK(std::abs(run1[j].corner(c, a) - avgs[c]) <= cfg.b);
      }
  // Different iterations draw differently.
  const auto run3 = sample_perturbations(g, avgs, cfg, 8);
  bool any_diff = false;
  for (long c = 0; c < g->cell_count(); ++c)
    for (int a = 0; a < g->corners_per_cell(); ++a)
      any_diff |= run1[0].corner(c, a) != run3[0].corner(c, a);
  CHECK(any_diff);
}

TEST_CASE("materialize_candidate matches the sampled list") {
  auto g = small_grid();
  std::vector<double> avgs(g->cell_count(), -0.5);
  PertConfig cfg;
  cfg.b = 3.0;
  cfg.n_pert = 3;
  cfg.clip_c = 2.0;
  const auto all = sample_perturbations(g, avgs, cfg, 5);
  for (int idx = 0; idx < 5; ++idx) {
    const DpwpFunction k = materialize_candidate(g, avgs, cfg, 5, idx);
    for (long c = 0; c < g->cell_count(); ++c)
      for (int a = 0; a < g->corners_per_cell(); ++a)
        CHECK(k.corner(c, a) == all[idx].corner(c, a));
  }
  CHECK_THROWS_AS(materialize_candidate(g, avgs, cfg, 5, 5), std::out_of_range);
}

TEST_CASE("shared_across_cells shares draws") {
  auto g = small_grid();
  std::vector<double> avgs(g->cell_count(), 0.0);
  PertConfig cfg;
  cfg.b = 5.0;
  cfg.n_pert = 1;
  cfg.augment_constants = false;
  cfg.shared_across_cells = true;
  const auto ks = sample_perturbations(g, avgs, cfg, 1);
  for (int a = 0; a < g->corners_per_cell(); ++a)
    for (long c = 1; c < g->cell_count(); ++c)
      CHECK(ks[0].corner(c, a) == ks[0].corner(0, a));
}

TEST_CASE("evaluation") {
  auto g = small_grid();
  const DpwpFunction c2 = DpwpFunction::constant(g, 2.0);
  CHECK(c2.eval(Pt{-0.3, 0.2, 0.0}) == 2.0);
  CHECK(c2.eval(Pt{1.0, 0.5, 0.0}) == 2.0);

  // Corners (0,0,1,1) along x in the first cell, zero elsewhere: cell-center
  // value 0.5.
  std::vector<double> coeffs(g->cell_count() * g->corners_per_cell(), 0.0);
  coeffs[1] = 1.0;  // corner with x-bit set, t-bit clear
  coeffs[3] = 1.0;  // x-bit and t-bit set
  const DpwpFunction ramp(g, coeffs);
  CHECK(ramp.eval(Pt{-0.75, 0.125, 0.0}) == doctest::Approx(0.5).epsilon(1e-15));

  // Two-cell discontinuity: the shared face takes the higher-index cell.
  std::vector<double> disc(g->cell_count() * g->corners_per_cell(), 0.0);
  for (int a = 0; a < g->corners_per_cell(); ++a) {
    disc[0 * g->corners_per_cell() + a] = 1.0;  // cells with ix=0 (it=0 block)
    disc[2 * g->corners_per_cell() + a] = 5.0;  // ix=1
  }
  const DpwpFunction two(g, disc);
  CHECK(two.eval(Pt{-0.5, 0.1, 0.0}) == 5.0);  // face between ix=0 and ix=1
  CHECK_THROWS_AS(two.eval(Pt{2.0, 0.1, 0.0}), std::domain_error);
}

TEST_CASE("W_h^{1,inf} norm") {
  auto g = small_grid();
  CHECK(DpwpFunction::constant(g, 2.0).norm_w1inf() == 2.0);
  CHECK(DpwpFunction::constant(g, 0.0).norm_w1inf() == 0.0);

  // One cell with corners 0 and 1 along x: max value 1, |grad| = 1/dx.
  std::vector<double> coeffs(g->cell_count() * g->corners_per_cell(), 0.0);
  coeffs[1] = 1.0;
  coeffs[3] = 1.0;
  const DpwpFunction ramp(g, coeffs);
  const double dx = g->cell_spacing(0);
  CHECK(ramp.norm_w1inf() == doctest::Approx(1.0 + g->h() / dx).epsilon(1e-14));
}

TEST_CASE("parameter errors") {
  auto g = small_grid();
  std::vector<double> avgs(g->cell_count(), 0.0);
  PertConfig cfg;
  cfg.b = -1.0;
  CHECK_THROWS_AS(sample_perturbations(g, avgs, cfg, 1), std::invalid_argument);
  cfg.b = 1.0;
  cfg.n_pert = 0;
  CHECK_THROWS_AS(sample_perturbations(g, avgs, cfg, 1), std::invalid_argument);
}

TEST_SUITE_END();
