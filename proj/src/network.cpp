#include "entnet/network.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "entnet/parallel.hpp"
#include "entnet/rng.hpp"

namespace entnet {
namespace {

void matvec(const Layer& layer, const double* x, double* y) {
  if (layer.sparse()) {
    const SparseMat& m = *layer.ws;
    for (int r = 0; r < m.rows; ++r) {
      double acc = layer.b[r];
      for (int k = m.rowptr[r]; k < m.rowptr[r + 1]; ++k) acc += m.val[k] * x[m.col[k]];
      y[r] = acc;
    }
  } else {
    const DenseMat& m = layer.w;
    const double* w = m.a.data();
    for (int r = 0; r < m.rows; ++r) {
      double acc = layer.b[r];
      for (int c = 0; c < m.cols; ++c) acc += w[c] * x[c];
      y[r] = acc;
      w += m.cols;
    }
  }
}

// y (rows x jd) = W * x (cols x jd), row-major Jacobian blocks.
void matjac(const Layer& layer, const double* x, double* y, int jd) {
  if (layer.sparse()) {
    const SparseMat& m = *layer.ws;
    for (int r = 0; r < m.rows; ++r) {
      double acc[kMaxDim + 1] = {0, 0, 0};
      for (int k = m.rowptr[r]; k < m.rowptr[r + 1]; ++k) {
        const double w = m.val[k];
        const double* xr = x + static_cast<std::size_t>(m.col[k]) * jd;
        for (int j = 0; j < jd; ++j) acc[j] += w * xr[j];
      }
      for (int j = 0; j < jd; ++j) y[static_cast<std::size_t>(r) * jd + j] = acc[j];
    }
  } else {
    const DenseMat& m = layer.w;
    const double* w = m.a.data();
    for (int r = 0; r < m.rows; ++r) {
      double acc[kMaxDim + 1] = {0, 0, 0};
      for (int c = 0; c < m.cols; ++c) {
        const double wc = w[c];
        const double* xr = x + static_cast<std::size_t>(c) * jd;
        for (int j = 0; j < jd; ++j) acc[j] += wc * xr[j];
      }
      for (int j = 0; j < jd; ++j) y[static_cast<std::size_t>(r) * jd + j] = acc[j];
      w += m.cols;
    }
  }
}

thread_local std::vector<double> tls_a0, tls_a1, tls_j0, tls_j1;

}  // namespace

ClippedTanhNet::ClippedTanhNet(std::vector<Layer> layers, double clip)
    : layers_(std::move(layers)), clip_(clip) {
  if (layers_.empty()) throw std::invalid_argument("network: no layers");
  if (!(clip_ > 0.0)) throw std::invalid_argument("network: clip level must be positive");
  if (layers_.back().rows() != 1) throw std::invalid_argument("network: output width must be 1");
  max_width_ = layers_.front().cols();
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    if (layers_[l].rows() != static_cast<int>(layers_[l].b.size()))
      throw std::invalid_argument("network: bias size mismatch");
    if (l + 1 < layers_.size() && layers_[l].rows() != layers_[l + 1].cols())
      throw std::invalid_argument("network: layer shape mismatch");
    max_width_ = std::max(max_width_, layers_[l].rows());
  }
}

std::vector<int> ClippedTanhNet::widths() const {
  std::vector<int> w;
  w.push_back(layers_.front().cols());
  for (const Layer& l : layers_) w.push_back(l.rows());
  return w;
}

long ClippedTanhNet::param_count() const {
  long n = 0;
  for (const Layer& l : layers_) {
    n += l.sparse() ? static_cast<long>(l.ws->val.size())
                    : static_cast<long>(l.w.a.size());
    n += static_cast<long>(l.b.size());
  }
  return n;
}

bool ClippedTanhNet::all_dense() const {
  for (const Layer& l : layers_)
    if (l.sparse()) return false;
  return true;
}

double ClippedTanhNet::forward(const Pt& z) const {
  return forward_with_input_grad(z).value;
}

ClippedTanhNet::Eval ClippedTanhNet::forward_with_input_grad(const Pt& z) const {
  const int in = input_dim();
  const int jd = in;
  const std::size_t L = layers_.size();
  std::vector<double>&a0 = tls_a0, &a1 = tls_a1, &j0 = tls_j0, &j1 = tls_j1;
  a0.assign(z.begin(), z.begin() + in);
  j0.assign(static_cast<std::size_t>(in) * jd, 0.0);
  for (int i = 0; i < in; ++i) j0[static_cast<std::size_t>(i) * jd + i] = 1.0;
  a1.resize(max_width_);
  j1.resize(static_cast<std::size_t>(max_width_) * jd);

  for (std::size_t l = 0; l < L; ++l) {
    const Layer& layer = layers_[l];
    const int rows = layer.rows();
    a1.resize(static_cast<std::size_t>(rows));
    j1.resize(static_cast<std::size_t>(rows) * jd);
    matvec(layer, a0.data(), a1.data());
    matjac(layer, j0.data(), j1.data(), jd);
    if (l + 1 < L) {
      for (int r = 0; r < rows; ++r) {
        const double t = std::tanh(a1[r]);
        const double sp = 1.0 - t * t;
        a1[r] = t;
        for (int j = 0; j < jd; ++j) j1[static_cast<std::size_t>(r) * jd + j] *= sp;
      }
    }
    std::swap(a0, a1);
    std::swap(j0, j1);
  }

  Eval e;
  e.raw = a0[0];
  const double half = 0.5 * clip_;
  e.active = e.raw > -half && e.raw < half;
  e.value = e.raw < -half ? -half : (e.raw > half ? half : e.raw);
  if (e.active)
    for (int j = 0; j < jd; ++j) e.grad[j] = j0[j];
  return e;
}

double ClippedTanhNet::param_get(long i) const {
  for (const Layer& l : layers_) {
    if (l.sparse()) throw std::logic_error("param access on sparse layer");
    const long nw = static_cast<long>(l.w.a.size());
    if (i < nw) return l.w.a[i];
    i -= nw;
    const long nb = static_cast<long>(l.b.size());
    if (i < nb) return l.b[i];
    i -= nb;
  }
  throw std::out_of_range("param index");
}

void ClippedTanhNet::param_set(long i, double v) {
  for (Layer& l : layers_) {
    if (l.sparse()) throw std::logic_error("param access on sparse layer");
    const long nw = static_cast<long>(l.w.a.size());
    if (i < nw) {
      l.w.a[i] = v;
      return;
    }
    i -= nw;
    const long nb = static_cast<long>(l.b.size());
    if (i < nb) {
      l.b[i] = v;
      return;
    }
    i -= nb;
  }
  throw std::out_of_range("param index");
}

ClippedTanhNet init_network(const std::vector<int>& widths, double clip, std::uint64_t seed) {
  if (widths.size() < 2) throw std::invalid_argument("init_network: need at least input and output widths");
  for (int w : widths)
    if (w < 1) throw std::invalid_argument("init_network: zero layer width");
  std::vector<Layer> layers(widths.size() - 1);
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    const int rows = widths[l + 1], cols = widths[l];
    Layer& layer = layers[l];
    layer.w = DenseMat{rows, cols, std::vector<double>(static_cast<std::size_t>(rows) * cols)};
    layer.b.assign(rows, 0.0);
    const double lim = std::sqrt(6.0 / (rows + cols));
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c)
        layer.w.at(r, c) = rng::uniform(
            rng::key({seed, static_cast<std::uint64_t>(l), static_cast<std::uint64_t>(r),
                      static_cast<std::uint64_t>(c)}),
            -lim, lim);
  }
  return ClippedTanhNet(std::move(layers), clip);
}

ClippedTanhNet zero_network(const std::vector<int>& widths, double clip) {
  ClippedTanhNet net = init_network(widths, clip, 0);
  for (long i = 0; i < net.param_count(); ++i) net.param_set(i, 0.0);
  return net;
}

namespace {

// Per-thread reverse-mode workspace: activations and pre-activation Jacobians
// for every layer of one node evaluation.
struct GradWorkspace {
  std::vector<std::vector<double>> act;  // act[0] = input, act[l+1] = layer l output
  std::vector<std::vector<double>> qjac; // qjac[l] = W_l * J_{l-1} (rows x jd)
  std::vector<double> abar0, abar1, jbar0, jbar1, pbar, qbar;
};

thread_local GradWorkspace tls_gw;

void accumulate_node(const ClippedTanhNet& net, const FluxModel& flux,
                     const NodeTerm& term, double* grad) {
  const auto& layers = net.layers();
  const std::size_t L = layers.size();
  const int in = net.input_dim();
  const int jd = in;
  GradWorkspace& ws = tls_gw;
  ws.act.resize(L + 1);
  ws.qjac.resize(L);

  // Forward pass storing activations and pre-activation Jacobians.
  ws.act[0].assign(term.z.begin(), term.z.begin() + in);
  std::vector<double> jcur(static_cast<std::size_t>(in) * jd, 0.0);
  for (int i = 0; i < in; ++i) jcur[static_cast<std::size_t>(i) * jd + i] = 1.0;
  for (std::size_t l = 0; l < L; ++l) {
    const int rows = layers[l].rows();
    ws.act[l + 1].resize(rows);
    ws.qjac[l].resize(static_cast<std::size_t>(rows) * jd);
    matvec(layers[l], ws.act[l].data(), ws.act[l + 1].data());
    matjac(layers[l], jcur.data(), ws.qjac[l].data(), jd);
    if (l + 1 < L) {
      jcur.resize(static_cast<std::size_t>(rows) * jd);
      for (int r = 0; r < rows; ++r) {
        const double t = std::tanh(ws.act[l + 1][r]);
        const double sp = 1.0 - t * t;
        ws.act[l + 1][r] = t;
        for (int j = 0; j < jd; ++j)
          jcur[static_cast<std::size_t>(r) * jd + j] =
              sp * ws.qjac[l][static_cast<std::size_t>(r) * jd + j];
      }
    }
  }

  const double raw = ws.act[L][0];
  const double half = 0.5 * net.clip();
  if (!(raw > -half && raw < half)) return;  // saturated: frozen indicator kills the node
  const double u = raw;
  const double* gout = ws.qjac[L - 1].data();  // output-row input gradient

  // Cotangents on the output value and its input gradient. The residual
  // r = g[t] + sum_i f_i'(u) g[i] contributes f_i''(u) g[i] through u.
  double ubar = term.w_value;
  std::array<double, kMaxDim + 1> gbar{};
  if (term.w_residual != 0.0) {
    const int d = in - 1;
    for (int i = 0; i < d; ++i) {
      ubar += term.w_residual * flux.f_second(u, i) * gout[i];
      gbar[i] = term.w_residual * flux.f_prime(u, i);
    }
    gbar[d] = term.w_residual;
  }

  // Reverse pass. Layer l maps act[l] -> act[l+1].
  std::vector<double>&abar = ws.abar0, &abar_next = ws.abar1;
  std::vector<double>&jbar = ws.jbar0, &jbar_next = ws.jbar1;

  // Output layer (affine, single row).
  {
    const Layer& layer = layers[L - 1];
    const int cols = layer.cols();
    const double pbar = ubar;
    // grad offset of layer L-1
    long off = 0;
    for (std::size_t l = 0; l + 1 < L; ++l)
      off += static_cast<long>(layers[l].w.a.size()) + static_cast<long>(layers[l].b.size());
    double* gw = grad + off;
    const std::vector<double>& a_in = ws.act[L - 1];
    if (L >= 2) {
      // J_{L-2} after activation = sigma' .* Q_{L-2}
      const std::vector<double>& q_in = ws.qjac[L - 2];
      for (int c = 0; c < cols; ++c) {
        const double t = a_in[c];
        const double sp = 1.0 - t * t;
        double acc = pbar * t;
        for (int j = 0; j < jd; ++j)
          acc += gbar[j] * sp * q_in[static_cast<std::size_t>(c) * jd + j];
        gw[c] += acc;
      }
    } else {
      for (int c = 0; c < cols; ++c) {
        double acc = pbar * a_in[c];
        acc += gbar[c];  // J_in = identity
        gw[c] += acc;
      }
    }
    gw[cols] += pbar;  // bias
    if (L == 1) return;
    abar.assign(cols, 0.0);
    jbar.assign(static_cast<std::size_t>(cols) * jd, 0.0);
    const double* w = layer.w.a.data();
    for (int c = 0; c < cols; ++c) {
      abar[c] = pbar * w[c];
      for (int j = 0; j < jd; ++j) jbar[static_cast<std::size_t>(c) * jd + j] = gbar[j] * w[c];
    }
  }

  for (int l = static_cast<int>(L) - 2; l >= 0; --l) {
    const Layer& layer = layers[l];
    const int rows = layer.rows(), cols = layer.cols();
    const std::vector<double>& a_out = ws.act[l + 1];  // tanh outputs
    const std::vector<double>& q = ws.qjac[l];
    ws.pbar.resize(rows);
    ws.qbar.resize(static_cast<std::size_t>(rows) * jd);
    for (int r = 0; r < rows; ++r) {
      const double t = a_out[r];
      const double sp = 1.0 - t * t;
      const double spp = -2.0 * t * sp;  // d(sigma')/dp
      double jq = 0.0;
      for (int j = 0; j < jd; ++j) {
        const std::size_t k = static_cast<std::size_t>(r) * jd + j;
        ws.qbar[k] = sp * jbar[k];
        jq += jbar[k] * q[k];
      }
      ws.pbar[r] = abar[r] * sp + spp * jq;
    }
    long off = 0;
    for (int m = 0; m < l; ++m)
      off += static_cast<long>(layers[m].w.a.size()) + static_cast<long>(layers[m].b.size());
    double* gw = grad + off;
    const std::vector<double>& a_in = ws.act[l];
    const bool in_is_input = l == 0;
    const std::vector<double>* q_in = in_is_input ? nullptr : &ws.qjac[l - 1];
    for (int r = 0; r < rows; ++r) {
      double* gr = gw + static_cast<std::size_t>(r) * cols;
      for (int c = 0; c < cols; ++c) {
        double acc = ws.pbar[r] * a_in[c];
        if (in_is_input) {
          acc += ws.qbar[static_cast<std::size_t>(r) * jd + c];  // J_in = identity
        } else {
          const double t = a_in[c];
          const double sp = 1.0 - t * t;
          for (int j = 0; j < jd; ++j)
            acc += ws.qbar[static_cast<std::size_t>(r) * jd + j] * sp *
                   (*q_in)[static_cast<std::size_t>(c) * jd + j];
        }
        gr[c] += acc;
      }
      gw[static_cast<std::size_t>(rows) * cols + r] += ws.pbar[r];
    }
    if (l == 0) break;
    abar_next.assign(cols, 0.0);
    jbar_next.assign(static_cast<std::size_t>(cols) * jd, 0.0);
    const double* w = layer.w.a.data();
    for (int r = 0; r < rows; ++r) {
      const double pb = ws.pbar[r];
      const double* wr = w + static_cast<std::size_t>(r) * cols;
      for (int c = 0; c < cols; ++c) {
        abar_next[c] += pb * wr[c];
        for (int j = 0; j < jd; ++j)
          jbar_next[static_cast<std::size_t>(c) * jd + j] +=
              ws.qbar[static_cast<std::size_t>(r) * jd + j] * wr[c];
      }
    }
    std::swap(abar, abar_next);
    std::swap(jbar, jbar_next);
  }
}

constexpr std::size_t kGradBlock = 256;

}  // namespace

ParamGrad grad_loss_params(const ClippedTanhNet& net, const FluxModel& flux,
                           std::span<const NodeTerm> terms) {
  if (!net.all_dense())
    throw std::logic_error("grad_loss_params: objective not assembled over a dense trainable net");
  const long np = net.param_count();
  const std::size_t n = terms.size();
  const int n_blocks = static_cast<int>((n + kGradBlock - 1) / kGradBlock);
  std::vector<std::vector<double>> partials(n_blocks);
  ThreadPool::global().run_blocks(n_blocks, [&](int b) {
    std::vector<double>& g = partials[b];
    g.assign(np, 0.0);
    const std::size_t b0 = static_cast<std::size_t>(b) * kGradBlock;
    const std::size_t b1 = std::min(n, b0 + kGradBlock);
    for (std::size_t i = b0; i < b1; ++i) accumulate_node(net, flux, terms[i], g.data());
  });
  ParamGrad grad(np, 0.0);
  for (const auto& g : partials)
    for (long i = 0; i < np; ++i) grad[i] += g[i];
  return grad;
}

AdamState::AdamState(long n_params, double lr_) : lr(lr_), m(n_params, 0.0), v(n_params, 0.0) {}

void adam_step(AdamState& state, ClippedTanhNet& net, const ParamGrad& grads) {
  const long np = net.param_count();
  if (static_cast<long>(grads.size()) != np ||
      static_cast<long>(state.m.size()) != np)
    throw std::invalid_argument("adam_step: shape mismatch");
  state.step += 1;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (long i = 0; i < np; ++i) {
    const double g = grads[i];
    state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * g;
    state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * g * g;
    const double mhat = state.m[i] / bc1;
    const double vhat = state.v[i] / bc2;
    net.param_set(i, net.param_get(i) - state.lr * mhat / (std::sqrt(vhat) + state.eps));
  }
}

void save_network(const ClippedTanhNet& net, const std::string& path) {
  if (!net.all_dense()) throw std::logic_error("save_network: sparse nets are not checkpointable");
  nlohmann::json j;
  j["format"] = "entropy-net-checkpoint";
  j["version"] = 1;
  j["clip"] = net.clip();
  j["widths"] = net.widths();
  nlohmann::json layers = nlohmann::json::array();
  for (const Layer& l : net.layers()) {
    nlohmann::json jl;
    jl["rows"] = l.w.rows;
    jl["cols"] = l.w.cols;
    jl["w"] = l.w.a;
    jl["b"] = l.b;
    layers.push_back(std::move(jl));
  }
  j["layers"] = std::move(layers);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open checkpoint for writing: " + path);
  out << j.dump();
}

ClippedTanhNet load_network(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  nlohmann::json j;
  in >> j;
  if (j.value("format", "") != "entropy-net-checkpoint" || j.value("version", 0) != 1)
    throw std::runtime_error("unrecognized checkpoint format: " + path);
  std::vector<Layer> layers;
  for (const auto& jl : j.at("layers")) {
    Layer l;
    l.w.rows = jl.at("rows").get<int>();
    l.w.cols = jl.at("cols").get<int>();
    l.w.a = jl.at("w").get<std::vector<double>>();
    l.b = jl.at("b").get<std::vector<double>>();
    layers.push_back(std::move(l));
  }
  return ClippedTanhNet(std::move(layers), j.at("clip").get<double>());
}

}  // namespace entnet
