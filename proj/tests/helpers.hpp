#pragma once

#include <doctest.h>

#include <cmath>
#include <vector>

#include "entnet/loss.hpp"
#include "entnet/network.hpp"
#include "entnet/rng.hpp"

namespace testutil {

// Normwise relative difference between two flat vectors.
inline double rel_diff(const std::vector<double>& a, const std::vector<double>& b) {
  REQUIRE(a.size() == b.size());
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num) / std::max(std::sqrt(den), 1e-300);
}

// Central finite differences of a parameter-space objective.
template <class Obj>
std::vector<double> fd_param_gradient(entnet::ClippedTanhNet& net, Obj&& objective,
                                      double scale = 1e-6) {
  std::vector<double> g(net.param_count());
  for (long i = 0; i < net.param_count(); ++i) {
    const double p0 = net.param_get(i);
    const double h = scale * std::max(1.0, std::abs(p0));
    net.param_set(i, p0 + h);
    const double fp = objective();
    net.param_set(i, p0 - h);
    const double fm = objective();
    net.param_set(i, p0);
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

inline double test_uniform(std::uint64_t k, double lo, double hi) {
  return entnet::rng::uniform(entnet::rng::key({0x7e57e57e57e57e57ull, k}), lo, hi);
}

}  // namespace testutil
