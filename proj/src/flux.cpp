#include "entnet/flux.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace entnet {
namespace {

// Buckley-Leverett denominator u^2 + (1-u)^2/2; minimum 1/3 at u = 1/3, so the
// flux has no singularity on R.
double bl_denom(double u) { return u * u + 0.5 * (1.0 - u) * (1.0 - u); }

std::map<std::string, FluxModel>& catalog() {
  static std::map<std::string, FluxModel> c = [] {
    std::map<std::string, FluxModel> m;
    m["burgers1d"] = FluxModel{
        "burgers1d", 1,
        [](double u, int) { return 0.5 * u * u; },
        [](double u, int) { return u; },
        [](double, int) { return 1.0; }};
    m["cubic"] = FluxModel{
        "cubic", 1,
        [](double u, int) { return u * u * u / 3.0; },
        [](double u, int) { return u * u; },
        [](double u, int) { return 2.0 * u; }};
    m["buckley_leverett"] = FluxModel{
        "buckley_leverett", 1,
        [](double u, int) { return u * u / bl_denom(u); },
        [](double u, int) {
          const double d = bl_denom(u);
          const double dp = 3.0 * u - 1.0;
          return (2.0 * u * d - u * u * dp) / (d * d);
        },
        [](double u, int) {
          // f'' = [(2D - 3u^2)D - 2D'(2uD - u^2 D')] / D^3, D'' = 3
          const double d = bl_denom(u);
          const double dp = 3.0 * u - 1.0;
          return ((2.0 * d - 3.0 * u * u) * d - 2.0 * dp * (2.0 * u * d - u * u * dp)) /
                 (d * d * d);
        }};
    m["sine_flux"] = FluxModel{
        "sine_flux", 1,
        [](double u, int) { return std::sin(M_PI * u); },
        [](double u, int) { return M_PI * std::cos(M_PI * u); },
        [](double u, int) { return -M_PI * M_PI * std::sin(M_PI * u); }};
    m["burgers2d"] = FluxModel{
        "burgers2d", 2,
        [](double u, int) { return 0.5 * u * u; },
        [](double u, int) { return u; },
        [](double, int) { return 1.0; }};
    return m;
  }();
  return c;
}

std::mutex& catalog_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

FluxModel make_flux(const std::string& name) {
  std::lock_guard<std::mutex> lock(catalog_mutex());
  auto it = catalog().find(name);
  if (it == catalog().end())
    throw std::invalid_argument("unknown flux '" + name + "'");
  return it->second;
}

std::vector<std::string> flux_catalog_names() {
  std::lock_guard<std::mutex> lock(catalog_mutex());
  std::vector<std::string> names;
  for (const auto& [k, v] : catalog()) names.push_back(k);
  return names;
}

void register_flux(const FluxModel& model) {
  if (model.name.empty() || model.dim < 1 || model.dim > kMaxDim || !model.f ||
      !model.f_prime || !model.f_second)
    throw std::invalid_argument("invalid flux model");
  std::lock_guard<std::mutex> lock(catalog_mutex());
  catalog()[model.name] = model;
}

std::vector<double> eval_spacetime_flux(const FluxModel& model, double u) {
  std::vector<double> F(model.dim + 1);
  for (int i = 0; i < model.dim; ++i) F[i] = model.f(u, i);
  F[model.dim] = u;
  return F;
}

}  // namespace entnet
