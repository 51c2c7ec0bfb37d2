#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "entnet/cpwl.hpp"

namespace entnet {
namespace {

// Identity channels: x ~ (B/delta) tanh(delta x / B), error <= B delta^2 / 3.
constexpr double kCarryDelta = 1e-5;
// Square gadget: x^2 from a Richardson-extrapolated second central difference
// of tanh around p, sq(x) = [16 (T(p+lx)+T(p-lx)) - (T(p+2lx)+T(p-2lx))
// - 30 T(p)] / (12 sigma''(p) l^2), with Taylor error O(l^4 x^6).
constexpr double kSqLambda = 1.5e-3;
constexpr double kSqP = 0.75;

double sigma2(double p) {
  const double t = std::tanh(p);
  return -2.0 * t * (1.0 - t * t);
}

struct Unit {
  std::vector<std::pair<int, double>> in;  // (unit index in previous level, weight)
  double bias = 0.0;
};

// Affine combination of one level's outputs (level 0 = the network input).
struct Wire {
  int level = 0;
  std::vector<std::pair<int, double>> units;  // sorted by index
  double bias = 0.0;
  double lo = 0.0, hi = 0.0;  // value bounds over the compile domain
};

Wire combine(const Wire& a, const Wire& b, double ca, double cb) {
  Wire w;
  w.level = a.level;
  w.bias = ca * a.bias + cb * b.bias;
  w.units.reserve(a.units.size() + b.units.size());
  std::size_t i = 0, j = 0;
  while (i < a.units.size() || j < b.units.size()) {
    if (j == b.units.size() || (i < a.units.size() && a.units[i].first < b.units[j].first)) {
      w.units.emplace_back(a.units[i].first, ca * a.units[i].second);
      ++i;
    } else if (i == a.units.size() || b.units[j].first < a.units[i].first) {
      w.units.emplace_back(b.units[j].first, cb * b.units[j].second);
      ++j;
    } else {
      w.units.emplace_back(a.units[i].first, ca * a.units[i].second + cb * b.units[j].second);
      ++i;
      ++j;
    }
  }
  const double alo = ca >= 0 ? ca * a.lo : ca * a.hi;
  const double ahi = ca >= 0 ? ca * a.hi : ca * a.lo;
  const double blo = cb >= 0 ? cb * b.lo : cb * b.hi;
  const double bhi = cb >= 0 ? cb * b.hi : cb * b.lo;
  w.lo = alo + blo;
  w.hi = ahi + bhi;
  return w;
}

class NetBuilder {
 public:
  explicit NetBuilder(int input_dim) : input_dim_(input_dim) {}

  Wire input(int axis, double lo, double hi) const {
    Wire w;
    w.level = 0;
    w.units = {{axis, 1.0}};
    w.lo = lo;
    w.hi = hi;
    return w;
  }

  Wire constant(double v, int level = 0) const {
    Wire w;
    w.level = level;
    w.bias = v;
    w.lo = w.hi = v;
    return w;
  }

  // tanh(scale * w + off) as a new unit one level up; the returned wire has
  // the stated value bounds.
  Wire unit(const Wire& w, double scale, double off, double lo = -1.0, double hi = 1.0) {
    const int lvl = w.level;
    if (static_cast<int>(layers_.size()) < lvl + 1) layers_.resize(lvl + 1);
    Unit u;
    u.bias = scale * w.bias + off;
    u.in.reserve(w.units.size());
    for (const auto& [idx, c] : w.units) u.in.emplace_back(idx, scale * c);
    layers_[lvl].push_back(std::move(u));
    Wire out;
    out.level = lvl + 1;
    out.units = {{static_cast<int>(layers_[lvl].size()) - 1, 1.0}};
    out.lo = lo;
    out.hi = hi;
    return out;
  }

  Wire carry(const Wire& w) {
    const double bound = std::max({std::abs(w.lo), std::abs(w.hi), 1e-12});
    Wire u = unit(w, kCarryDelta / bound, 0.0);
    for (auto& [idx, c] : u.units) c = bound / kCarryDelta;
    u.bias = 0.0;
    u.lo = w.lo;
    u.hi = w.hi;
    return u;
  }

  Wire lift_to(Wire w, int level) {
    if (w.units.empty()) {  // bias-only wires are level-independent
      w.level = level;
      return w;
    }
    while (w.level < level) w = carry(w);
    return w;
  }

  // sq(x) for |x| bounded by ~2.5, as an affine combination of four tanh
  // units one level up.
  Wire square(const Wire& x) {
    const double l = kSqLambda;
    const double inv = 1.0 / (12.0 * sigma2(kSqP) * l * l);
    Wire t1 = unit(x, l, kSqP);
    Wire t2 = unit(x, -l, kSqP);
    Wire t3 = unit(x, 2.0 * l, kSqP);
    Wire t4 = unit(x, -2.0 * l, kSqP);
    Wire s = combine(combine(t1, t2, 16.0 * inv, 16.0 * inv),
                     combine(t3, t4, -inv, -inv), 1.0, 1.0);
    s.bias += -30.0 * std::tanh(kSqP) * inv;
    const double xmax = std::max(std::abs(x.lo), std::abs(x.hi));
    s.lo = -1e-6;
    s.hi = xmax * xmax * (1.0 + 1e-6) + 1e-6;
    return s;
  }

  // S_min/max,tau(r, s) as a two-tanh-layer sublayer: t = tanh(tau d) plus
  // identity carries, then d * t via the polarization identity
  // d t = Bd ((d/Bd + t)^2 - (d/Bd - t)^2) / 4 on rescaled inputs.
  Wire smooth_binary(const Wire& r, const Wire& s, bool is_min, double tau) {
    if (r.level != s.level) throw std::logic_error("smooth_binary: level mismatch");
    Wire d = combine(r, s, 1.0, -1.0);
    Wire u = combine(r, s, 0.5, 0.5);
    const double bd = std::max({std::abs(d.lo), std::abs(d.hi), 1e-12});

    Wire t = unit(d, tau, 0.0);
    Wire d1 = carry(d);
    Wire u1 = carry(u);

    Wire x1 = combine(d1, t, 1.0 / bd, 1.0);
    Wire x2 = combine(d1, t, 1.0 / bd, -1.0);
    Wire sq1 = square(x1);
    Wire sq2 = square(x2);
    Wire u2 = carry(u1);

    Wire m = combine(sq1, sq2, bd / 4.0, -bd / 4.0);  // = d tanh(tau d)
    Wire out = combine(u2, m, 1.0, is_min ? -0.5 : 0.5);
    const double slack = 0.15 / tau + 1e-6 * bd + 1e-9;
    if (is_min) {
      out.lo = std::min(r.lo, s.lo) - slack;
      out.hi = std::min(r.hi, s.hi) + slack;
    } else {
      out.lo = std::max(r.lo, s.lo) - slack;
      out.hi = std::max(r.hi, s.hi) + slack;
    }
    return out;
  }

  int top_level() const { return static_cast<int>(layers_.size()); }

  ClippedTanhNet finalize(const Wire& out, double clip) {
    std::vector<Layer> net_layers;
    int prev_width = input_dim_;
    for (const auto& units : layers_) {
      const int rows = static_cast<int>(units.size());
      Layer layer;
      const long dense_size = static_cast<long>(rows) * prev_width;
      if (dense_size <= 1 << 16) {
        layer.w = DenseMat{rows, prev_width,
                           std::vector<double>(static_cast<std::size_t>(dense_size), 0.0)};
        for (int r = 0; r < rows; ++r)
          for (const auto& [c, v] : units[r].in) layer.w.at(r, c) = v;
      } else {
        SparseMat sm;
        sm.rows = rows;
        sm.cols = prev_width;
        sm.rowptr.resize(rows + 1, 0);
        for (int r = 0; r < rows; ++r)
          sm.rowptr[r + 1] = sm.rowptr[r] + static_cast<int>(units[r].in.size());
        sm.col.reserve(sm.rowptr[rows]);
        sm.val.reserve(sm.rowptr[rows]);
        for (int r = 0; r < rows; ++r)
          for (const auto& [c, v] : units[r].in) {
            sm.col.push_back(c);
            sm.val.push_back(v);
          }
        layer.ws = std::move(sm);
      }
      layer.b.resize(rows);
      for (int r = 0; r < rows; ++r) layer.b[r] = units[r].bias;
      net_layers.push_back(std::move(layer));
      prev_width = rows;
    }
    // Affine output row.
    Layer head;
    head.w = DenseMat{1, prev_width, std::vector<double>(prev_width, 0.0)};
    for (const auto& [c, v] : out.units) head.w.at(0, c) = v;
    head.b = {out.bias};
    net_layers.push_back(std::move(head));
    return ClippedTanhNet(std::move(net_layers), clip);
  }

 private:
  int input_dim_;
  std::vector<std::vector<Unit>> layers_;
};

Wire realize_expr(NetBuilder& nb, const MinMaxExpr& e, int node, double tau,
                  const double* bb_lo, const double* bb_hi) {
  const MinMaxExpr::Node& nd = e.nodes[node];
  if (nd.kind == MinMaxExpr::kLeaf) {
    Wire w = nb.constant(nd.off);
    for (int a = 0; a < e.dim; ++a) {
      if (nd.coef[a] == 0.0) continue;
      w = combine(w, nb.input(a, bb_lo[a], bb_hi[a]), 1.0, nd.coef[a]);
    }
    w.lo = nd.lo;
    w.hi = nd.hi;
    return w;
  }
  Wire a = realize_expr(nb, e, nd.a, tau, bb_lo, bb_hi);
  Wire b = realize_expr(nb, e, nd.b, tau, bb_lo, bb_hi);
  const int lvl = std::max(a.level, b.level);
  a = nb.lift_to(std::move(a), lvl);
  b = nb.lift_to(std::move(b), lvl);
  return nb.smooth_binary(a, b, nd.kind == MinMaxExpr::kMin, tau);
}

// Globally affine functions compile to an exact single affine layer.
bool global_affine(const CpwlFunction& f, std::array<double, 3>& coef, double& off) {
  const SimplicialMesh& mesh = f.mesh();
  const int n = mesh.dim();
  bool first = true;
  for (int s = 0; s < mesh.simplex_count(); ++s) {
    std::array<double, 3> c{};
    double o = 0.0;
    double row[3];
    double roff;
    for (int k = 0; k <= n; ++k) {
      mesh.barycentric_affine(s, k, row, roff);
      const double v = f.nodal()[mesh.simplex(s)[k]];
      for (int a = 0; a < n; ++a) c[a] += v * row[a];
      o += v * roff;
    }
    if (first) {
      coef = c;
      off = o;
      first = false;
      continue;
    }
    double scale = std::abs(off) + 1.0;
    for (int a = 0; a < n; ++a) scale += std::abs(coef[a]);
    for (int a = 0; a < n; ++a)
      if (std::abs(c[a] - coef[a]) > 1e-12 * scale) return false;
    if (std::abs(o - off) > 1e-12 * scale) return false;
  }
  return true;
}

// Deterministic Halton points inside the mesh domain. An irrational rotation
// keeps samples off the dyadic mesh lines where the CPwL gradient is
// ambiguous.
std::vector<std::array<double, 3>> domain_sample(const SimplicialMesh& mesh, int count) {
  static const int primes[3] = {2, 3, 5};
  static const double shift[3] = {0.30901699437494742, 0.5477225575051661,
                                  0.7548776662466927};
  std::vector<std::array<double, 3>> pts;
  pts.reserve(count);
  double bary[4];
  for (long k = 1; static_cast<int>(pts.size()) < count && k < 100L * count + 1000; ++k) {
    std::array<double, 3> z{};
    for (int a = 0; a < mesh.dim(); ++a) {
      double f = 1.0, r = 0.0;
      long i = k;
      while (i > 0) {
        f /= primes[a];
        r += f * (i % primes[a]);
        i /= primes[a];
      }
      r += shift[a];
      r -= std::floor(r);
      z[a] = mesh.bbox_lo()[a] + r * (mesh.bbox_hi()[a] - mesh.bbox_lo()[a]);
    }
    if (mesh.locate(z.data(), bary) >= 0) pts.push_back(z);
  }
  if (pts.empty()) throw std::runtime_error("compile: could not sample the mesh domain");
  return pts;
}

double resolve_clip(const CpwlFunction& u_hat, double tol, double clip_c) {
  const double sup = u_hat.sup_nodal();
  const double c = clip_c > 0.0 ? clip_c : 2.0 * (sup + 1.0);
  const double margin = std::max(2.0 * tol, 1e-6);
  if (sup > 0.5 * c - margin)
    throw std::invalid_argument("compile: nodal values violate the clip margin");
  return c;
}

// Hats with an exactly zero nodal weight contribute nothing and are skipped.
ClippedTanhNet build_net(const CpwlFunction& u_hat,
                         const std::vector<std::pair<int, MinMaxExpr>>& hats, double tau,
                         double c) {
  const SimplicialMesh& mesh = u_hat.mesh();
  NetBuilder nb(mesh.dim());
  std::vector<std::pair<int, Wire>> roots;
  roots.reserve(hats.size());
  int top = 0;
  for (const auto& [j, e] : hats) {
    Wire w = realize_expr(nb, e, e.root, tau, mesh.bbox_lo(), mesh.bbox_hi());
    top = std::max(top, w.level);
    roots.emplace_back(j, std::move(w));
  }
  Wire out = nb.constant(0.0, top);
  for (auto& [j, w] : roots) {
    Wire lifted = nb.lift_to(std::move(w), top);
    out = combine(out, lifted, 1.0, u_hat.nodal()[j]);
  }
  return nb.finalize(out, c);
}

std::vector<std::pair<int, MinMaxExpr>> nonzero_hats(const CpwlFunction& u_hat) {
  std::vector<std::pair<int, MinMaxExpr>> hats;
  for (int v = 0; v < u_hat.mesh().vertex_count(); ++v)
    if (u_hat.nodal()[v] != 0.0) hats.emplace_back(v, hat_minmax_expr(u_hat.mesh(), v));
  return hats;
}

}  // namespace

ClippedTanhNet build_cpwl_net(const CpwlFunction& u_hat, double tau, double clip_c) {
  const double c = resolve_clip(u_hat, 1e-6, clip_c);
  std::array<double, 3> coef{};
  double off = 0.0;
  if (global_affine(u_hat, coef, off)) {
    NetBuilder nb(u_hat.mesh().dim());
    Wire out = nb.constant(off);
    for (int a = 0; a < u_hat.mesh().dim(); ++a)
      if (coef[a] != 0.0) out = combine(out, nb.input(a, 0, 0), 1.0, coef[a]);
    return nb.finalize(out, c);
  }
  return build_net(u_hat, nonzero_hats(u_hat), tau, c);
}

CompiledCpwl compile_cpwl_to_net(const CpwlFunction& u_hat, double tol, double clip_c) {
  if (!(tol > 0.0)) throw std::invalid_argument("compile: tol must be positive");
  const double c = resolve_clip(u_hat, tol, clip_c);
  const SimplicialMesh& mesh = u_hat.mesh();

  std::array<double, 3> coef{};
  double off = 0.0;
  if (global_affine(u_hat, coef, off)) {
    ClippedTanhNet net = build_cpwl_net(u_hat, 16.0, c);
    return CompiledCpwl{std::move(net), {}, 0.0};
  }

  const std::vector<std::pair<int, MinMaxExpr>> hats = nonzero_hats(u_hat);

  const auto sup_pts = domain_sample(mesh, 10000);
  const int w11_count = std::min<int>(2000, static_cast<int>(sup_pts.size()));

  CompiledCpwl out{ClippedTanhNet({Layer{DenseMat{1, mesh.dim(),
                                                  std::vector<double>(mesh.dim(), 0.0)},
                                         {}, {0.0}}},
                                  c),
                   {},
                   0.0};
  for (double tau = 16.0; tau <= static_cast<double>(1 << 20); tau *= 2.0) {
    ClippedTanhNet net = build_net(u_hat, hats, tau, c);
    double sup_err = 0.0;
    for (const auto& z : sup_pts) {
      Pt p{z[0], z[1], z[2]};
      sup_err = std::max(sup_err, std::abs(net.forward(p) - u_hat.eval(z.data())));
    }
    double w11 = 0.0;
    for (int i = 0; i < w11_count; ++i) {
      Pt p{sup_pts[i][0], sup_pts[i][1], sup_pts[i][2]};
      const auto e = net.forward_with_input_grad(p);
      double v;
      double g[3] = {0, 0, 0};
      u_hat.eval_grad(sup_pts[i].data(), v, g);
      for (int a = 0; a < mesh.dim(); ++a) w11 += std::abs(e.grad[a] - g[a]);
    }
    double measure = 1.0;
    for (int a = 0; a < mesh.dim(); ++a)
      measure *= mesh.bbox_hi()[a] - mesh.bbox_lo()[a];
    w11 = w11 / w11_count * measure;
    out.trace.push_back({tau, sup_err, w11});
    if (sup_err <= tol) {
      out.net = std::move(net);
      out.tau_final = tau;
      return out;
    }
  }
  std::ostringstream msg;
  msg << "compile: tau cap 2^20 reached without meeting tol " << tol << "; trace:";
  for (const auto& row : out.trace)
    msg << " (tau=" << row.tau << ", sup=" << row.sup_error << ")";
  throw std::runtime_error(msg.str());
}

}  // namespace entnet
