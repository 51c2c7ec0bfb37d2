#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "entnet/flux.hpp"
#include "entnet/grid.hpp"

namespace entnet {

struct DenseMat {
  int rows = 0, cols = 0;
  std::vector<double> a;  // row-major
  double& at(int r, int c) { return a[static_cast<std::size_t>(r) * cols + c]; }
  double at(int r, int c) const { return a[static_cast<std::size_t>(r) * cols + c]; }
};

// CSR storage for the wide, sparsely connected networks produced by the CPwL
// compiler. Training-path operations require dense layers.
struct SparseMat {
  int rows = 0, cols = 0;
  std::vector<int> rowptr;  // rows + 1
  std::vector<int> col;
  std::vector<double> val;
};

struct Layer {
  DenseMat w;
  std::optional<SparseMat> ws;
  std::vector<double> b;
  bool sparse() const { return ws.has_value(); }
  int rows() const { return sparse() ? ws->rows : w.rows; }
  int cols() const { return sparse() ? ws->cols : w.cols; }
};

// Tanh MLP composed with the fixed clipping head Pi_c confining outputs to
// [-c/2, c/2]. All activations are tanh except the affine output layer.
class ClippedTanhNet {
 public:
  ClippedTanhNet(std::vector<Layer> layers, double clip);

  double clip() const { return clip_; }
  int input_dim() const { return layers_.front().cols(); }
  int depth() const { return static_cast<int>(layers_.size()); }
  const std::vector<Layer>& layers() const { return layers_; }
  std::vector<int> widths() const;
  long param_count() const;  // dense entries, or nnz for sparse layers
  bool all_dense() const;
  int max_width() const { return max_width_; }

  double forward(const Pt& z) const;

  struct Eval {
    double value = 0.0;
    std::array<double, kMaxDim + 1> grad{};  // zero when the clip is active
    bool active = true;                      // -c/2 < raw < c/2
    double raw = 0.0;
  };
  Eval forward_with_input_grad(const Pt& z) const;

  // Flat parameter access over dense layers, ordered (W0 row-major, b0, W1,
  // b1, ...). Throws std::logic_error on sparse layers.
  double param_get(long i) const;
  void param_set(long i, double v);

 private:
  friend void adam_step_impl(class AdamState&, ClippedTanhNet&, std::span<const double>);
  std::vector<Layer> layers_;
  double clip_;
  int max_width_;
};

// Glorot-uniform weights keyed by (seed, layer, row, col); zero biases.
// widths lists every layer width including input and the scalar output.
ClippedTanhNet init_network(const std::vector<int>& widths, double clip, std::uint64_t seed);
ClippedTanhNet zero_network(const std::vector<int>& widths, double clip);

// One quadrature-node term of a frozen training objective:
//   contribution = w_residual * r(z) + w_value * u(z),
// where r = dt(u) + f'(u).grad_x(u). The loss module bakes the frozen sgn
// factors and quadrature weights into w_residual / w_value.
struct NodeTerm {
  Pt z;
  double w_residual = 0.0;
  double w_value = 0.0;
};

using ParamGrad = std::vector<double>;  // flat, matches param_get indexing

// Reverse-mode gradient of sum of node terms; the clip indicator and sgn
// factors are frozen at the current activation pattern. Deterministic
// block-folded accumulation. Requires an all-dense net.
ParamGrad grad_loss_params(const ClippedTanhNet& net, const FluxModel& flux,
                           std::span<const NodeTerm> terms);

class AdamState {
 public:
  AdamState(long n_params, double lr);
  double lr, beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  long step = 0;
  std::vector<double> m, v;
};

void adam_step(AdamState& state, ClippedTanhNet& net, const ParamGrad& grads);

// Versioned JSON checkpoint (layer shapes + row-major weight data).
void save_network(const ClippedTanhNet& net, const std::string& path);
ClippedTanhNet load_network(const std::string& path);

}  // namespace entnet
