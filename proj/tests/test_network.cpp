#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <cstdio>
#include <filesystem>

#include "entnet/network.hpp"
#include "entnet/rng.hpp"
#include "helpers.hpp"

using namespace entnet;

namespace {

// u_raw = w.z + b as a single affine layer.
ClippedTanhNet affine_net(std::vector<double> w, double b, double clip) {
  Layer l;
  l.w = DenseMat{1, static_cast<int>(w.size()), w};
  l.b = {b};
  std::vector<Layer> ls;
  ls.push_back(std::move(l));
  return ClippedTanhNet(std::move(ls), clip);
}

}  // namespace

TEST_SUITE_BEGIN("network");

TEST_CASE("initialization") {
  const auto n1 = init_network({3, 64, 64, 64, 64, 1}, 4.0, 9);
  const auto n2 = init_network({3, 64, 64, 64, 64, 1}, 4.0, 9);
  REQUIRE(n1.param_count() == n2.param_count());
  for (long i = 0; i < n1.param_count(); ++i) CHECK(n1.param_get(i) == n2.param_get(i));

  // Table-1 architecture: 4 hidden layers of width 64.
  CHECK(n1.depth() == 5);
  const auto w = n1.widths();
  CHECK(w == std::vector<int>{3, 64, 64, 64, 64, 1});

  const auto zero = zero_network({2, 8, 1}, 2.0);
  CHECK(zero.forward(Pt{0.3, -0.8, 0.0}) == 0.0);
  CHECK(zero.forward(Pt{-3.0, 10.0, 0.0}) == 0.0);

  CHECK_THROWS_AS(init_network({2, 0, 1}, 2.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(init_network({2}, 2.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(init_network({2, 4, 1}, 0.0, 1), std::invalid_argument);
}

TEST_CASE("clipping head") {
  CHECK(affine_net({0.0, 0.0}, 10.0, 2.0).forward(Pt{0, 0, 0}) == 1.0);
  CHECK(affine_net({0.0, 0.0}, -0.3, 2.0).forward(Pt{0, 0, 0}) == -0.3);
  CHECK(affine_net({0.0, 0.0}, -10.0, 2.0).forward(Pt{0, 0, 0}) == -1.0);
}

TEST_CASE("input gradients") {
  // Saturated: indicator zeroes the gradient.
  const auto sat = affine_net({5.0, 0.0}, 0.0, 2.0);
  const auto es = sat.forward_with_input_grad(Pt{3.0, 0.0, 0.0});
  CHECK_FALSE(es.active);
  CHECK(es.grad[0] == 0.0);
  CHECK(es.value == 1.0);

  // u_raw = 2x + t, unclipped.
  const auto lin = affine_net({2.0, 1.0}, 0.0, 100.0);
  const auto el = lin.forward_with_input_grad(Pt{0.1, 0.2, 0.0});
  CHECK(el.active);
  CHECK(el.grad[0] == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(el.grad[1] == doctest::Approx(1.0).epsilon(1e-15));

  // Random small nets match central differences away from the clip.
  for (int trial = 0; trial < 5; ++trial) {
    const auto net = init_network({2, 6, 6, 1}, 2.0, 70 + trial);
    int checked = 0;
    for (int k = 0; k < 40; ++k) {
      Pt z{rng::uniform(rng::key({1u, static_cast<std::uint64_t>(k)}), -1.0, 1.0),
           rng::uniform(rng::key({2u, static_cast<std::uint64_t>(k)}), 0.0, 0.5), 0.0};
      const auto e = net.forward_with_input_grad(z);
      if (std::abs(std::abs(e.raw) - 1.0) < 1e-3) continue;  // near the clip edge
      for (int a = 0; a < 2; ++a) {
        Pt zp = z, zm = z;
        zp[a] += 1e-6;
        zm[a] -= 1e-6;
        const double fd = (net.forward(zp) - net.forward(zm)) / 2e-6;
        if (std::abs(fd) > 1e-8)
          CHECK(std::abs(e.grad[a] - fd) / (std::abs(fd)) <= 1e-6);
      }
      ++checked;
    }
    CHECK(checked > 10);
  }
}

TEST_CASE("boundedness over random nets and inputs") {
  for (int trial = 0; trial < 10; ++trial) {
    const double c = 0.5 + trial;
    const auto net = init_network({3, 10, 1}, c, 300 + trial);
    for (int k = 0; k < 1000; ++k) {
      Pt z{testutil::test_uniform(3 * k, -5.0, 5.0), testutil::test_uniform(3 * k + 1, -5.0, 5.0),
           testutil::test_uniform(3 * k + 2, -5.0, 5.0)};
      CHECK(std::abs(net.forward(z)) <= 0.5 * c);
    }
  }
}

TEST_CASE("parameter gradient of a plain value objective") {
  const FluxModel flux = make_flux("burgers1d");
  auto net = init_network({2, 8, 8, 1}, 4.0, 5);
  const Pt z0{0.3, 0.2, 0.0};
  REQUIRE(net.forward_with_input_grad(z0).active);
  std::vector<NodeTerm> terms{{z0, 0.0, 1.0}};
  const ParamGrad g = grad_loss_params(net, flux, terms);
  const auto fd = testutil::fd_param_gradient(
      net, [&] { return net.forward(z0); });
  CHECK(testutil::rel_diff(g, fd) <= 1e-5);
}

TEST_CASE("zero net with zero data has zero ibc gradient") {
  const FluxModel flux = make_flux("burgers1d");
  auto net = zero_network({2, 8, 1}, 2.0);
  // L_ibc with u0 = 0: integrand |u| has sgn(0) = 0 weights, so the
  // assembled term list is empty and the gradient vanishes.
  std::vector<NodeTerm> terms;  // sgn(0 - 0) = 0 for every node
  const ParamGrad g = grad_loss_params(net, flux, terms);
  for (double v : g) CHECK(v == 0.0);
}

TEST_CASE("adam") {
  auto net = init_network({2, 4, 1}, 2.0, 3);
  const auto before = net;
  AdamState st(net.param_count(), 1e-3);
  adam_step(st, net, ParamGrad(net.param_count(), 0.0));
  for (long i = 0; i < net.param_count(); ++i)
    CHECK(net.param_get(i) == before.param_get(i));

  // One step from a zero state with constant gradient g:
  // update = -lr * g / (|g| + eps) after bias correction.
  auto net2 = zero_network({2, 4, 1}, 2.0);
  AdamState st2(net2.param_count(), 1e-3);
  ParamGrad g(net2.param_count(), 0.7);
  adam_step(st2, net2, g);
  const double expect = -1e-3 * 0.7 / (0.7 + st2.eps);
  for (long i = 0; i < net2.param_count(); ++i)
    CHECK(net2.param_get(i) == doctest::Approx(expect).epsilon(1e-12));

  // Determinism: the same gradient sequence gives bitwise-identical params.
  auto na = init_network({2, 6, 1}, 2.0, 11);
  auto nb = init_network({2, 6, 1}, 2.0, 11);
  AdamState sa(na.param_count(), 1e-3), sb(nb.param_count(), 1e-3);
  for (int step = 0; step < 5; ++step) {
    ParamGrad gs(na.param_count());
    for (long i = 0; i < na.param_count(); ++i)
      gs[i] = rng::uniform(rng::key({static_cast<std::uint64_t>(step),
                                     static_cast<std::uint64_t>(i)}),
                           -1.0, 1.0);
    adam_step(sa, na, gs);
    adam_step(sb, nb, gs);
  }
  for (long i = 0; i < na.param_count(); ++i) CHECK(na.param_get(i) == nb.param_get(i));

  CHECK_THROWS_AS(adam_step(sa, na, ParamGrad(3, 0.0)), std::invalid_argument);
}

TEST_CASE("checkpoint round-trip") {
  const auto net = init_network({2, 5, 3, 1}, 3.0, 77);
  const std::string path =
      (std::filesystem::temp_directory_path() / "entnet_ckpt_test.json").string();
  save_network(net, path);
  const auto back = load_network(path);
  CHECK(back.clip() == net.clip());
  REQUIRE(back.widths() == net.widths());
  for (long i = 0; i < net.param_count(); ++i) CHECK(back.param_get(i) == net.param_get(i));
  std::filesystem::remove(path);
}

TEST_CASE("evaluation is pure") {
  const auto net = init_network({2, 8, 8, 1}, 2.0, 19);
  std::vector<Pt> zs;
  for (int k = 0; k < 50; ++k)
    zs.push_back(Pt{testutil::test_uniform(2 * k, -1.0, 1.0),
                    testutil::test_uniform(2 * k + 1, 0.0, 0.5), 0.0});
  std::vector<double> fwd;
  for (const Pt& z : zs) fwd.push_back(net.forward(z));
  for (int k = 49; k >= 0; --k) CHECK(net.forward(zs[k]) == fwd[k]);
}

TEST_SUITE_END();
