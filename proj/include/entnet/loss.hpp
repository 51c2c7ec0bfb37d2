#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "entnet/dpwp.hpp"
#include "entnet/flux.hpp"
#include "entnet/grid.hpp"
#include "entnet/network.hpp"
#include "entnet/problems.hpp"

namespace entnet {

// Space-time scalar field with an a.e. gradient; the common interface for
// networks, CPwL competitors, and analytic test fields.
class Field {
 public:
  virtual ~Field() = default;
  virtual void eval(const Pt& z, double& value, double* grad) const = 0;
};

class NetField : public Field {
 public:
  explicit NetField(const ClippedTanhNet& net) : net_(net) {}
  void eval(const Pt& z, double& value, double* grad) const override {
    const auto e = net_.forward_with_input_grad(z);
    value = e.value;
    for (int a = 0; a < net_.input_dim(); ++a) grad[a] = e.grad[a];
  }

 private:
  const ClippedTanhNet& net_;
};

class AnalyticField : public Field {
 public:
  using ValueFn = std::function<double(const Pt&)>;
  using GradFn = std::function<void(const Pt&, double*)>;
  AnalyticField(ValueFn v, GradFn g) : v_(std::move(v)), g_(std::move(g)) {}
  void eval(const Pt& z, double& value, double* grad) const override {
    value = v_(z);
    g_(z, grad);
  }

 private:
  ValueFn v_;
  GradFn g_;
};

// Values and residuals of a field at every quadrature node.
struct NodalField {
  std::vector<double> value;
  std::vector<double> residual;
};

double residual_at(const Field& field, const FluxModel& flux, const Pt& z);

NodalField eval_nodal(const Field& field, const FluxModel& flux, const QuadGrid& grid);

// Trapezoid of residual * sgn(field - k); sgn(0) = 0; k evaluated with the
// grid's face tie-break.
double j_ent(const NodalField& nf, const QuadGrid& grid, const DpwpFunction& k);
double j_ent(const Field& field, const FluxModel& flux, const DpwpFunction& k,
             const QuadGrid& grid);

// Sampled entropy loss: max over candidates and the attaining index (ties
// broken by lowest index). Throws std::invalid_argument on an empty list.
std::pair<double, int> l_ent_hat(const NodalField& nf, const QuadGrid& grid,
                                 std::span<const DpwpFunction> candidates);

double l_reg(const NodalField& nf, const QuadGrid& grid, double h);

// (initial, boundary) L1 mismatches; g == nullptr means zero trace.
std::pair<double, double> l_ibc(const Field& field, const SpaceTimeFn& u0,
                                const SpaceTimeFn* g, const QuadGrid& grid);

struct LossBreakdown {
  double j_ent_star = 0.0;
  double l_reg = 0.0;
  double l_ibc_initial = 0.0;
  double l_ibc_boundary = 0.0;
  double total = 0.0;
  int argmax_index = -1;
  double argmax_norm = 0.0;
};

// One Algorithm-1 loss evaluation: sample candidates from the cell averages
// of the field, select k*, assemble the sum. Deterministic for fixed
// (seed, iteration); candidates are scored without being materialized, with
// values identical to sample_perturbations + j_ent.
LossBreakdown total_loss(const Field& field, const FluxModel& flux,
                         const SpaceTimeFn& u0, const SpaceTimeFn* g,
                         const PertConfig& pert,
                         const std::shared_ptr<const QuadGrid>& grid,
                         std::uint64_t iteration);
LossBreakdown total_loss(const Field& field, const FluxModel& flux,
                         const BenchmarkProblem& problem, const PertConfig& pert,
                         const std::shared_ptr<const QuadGrid>& grid,
                         std::uint64_t iteration);

// As total_loss, but also returns the materialized argmax candidate and the
// nodal field (for the gradient step).
LossBreakdown total_loss_with_argmax(const Field& field, const FluxModel& flux,
                                     const SpaceTimeFn& u0, const SpaceTimeFn* g,
                                     const PertConfig& pert,
                                     const std::shared_ptr<const QuadGrid>& grid,
                                     std::uint64_t iteration, NodalField& nf_out,
                                     std::unique_ptr<DpwpFunction>& k_star_out);

// Frozen-convention gradient assembly: interior terms carry
// w_n (sgn(u-k*) + h sgn(r)) on the residual, initial/boundary terms carry
// w sgn(u - data) on the value.
std::vector<NodeTerm> loss_node_terms(const NodalField& nf, const QuadGrid& grid,
                                      const DpwpFunction& k_star, const Field& field,
                                      const SpaceTimeFn& u0, const SpaceTimeFn* g,
                                      double h);

}  // namespace entnet
