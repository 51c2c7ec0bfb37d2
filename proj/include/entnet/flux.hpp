#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace entnet {

inline constexpr int kMaxDim = 2;  // spatial dimensions supported

// Scalar flux f: R -> R^d with derivative f'. Immutable after construction;
// safe to share across threads.
struct FluxModel {
  std::string name;
  int dim = 1;
  std::function<double(double, int)> f;        // component i of f(u)
  std::function<double(double, int)> f_prime;  // component i of f'(u)
  std::function<double(double, int)> f_second; // component i of f''(u); used by
                                               // the parameter gradient of the loss
};

// Catalog lookup. Throws std::invalid_argument for unknown names.
FluxModel make_flux(const std::string& name);
std::vector<std::string> flux_catalog_names();

// User-defined fluxes enter the same catalog used by config files.
void register_flux(const FluxModel& model);

// Space-time flux F(u) = (f(u), u); the last component is u itself.
std::vector<double> eval_spacetime_flux(const FluxModel& model, double u);

}  // namespace entnet
