#include "entnet/cpwl.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace entnet {
namespace {

constexpr double kBaryTol = 1e-12;

// Inverts the (dim x dim) edge matrix of a simplex via Gaussian elimination.
void invert_small(int n, std::vector<double>& m /*row-major, in/out*/) {
  std::vector<double> inv(n * n, 0.0);
  for (int i = 0; i < n; ++i) inv[i * n + i] = 1.0;
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(m[r * n + c]) > std::abs(m[piv * n + c])) piv = r;
    if (m[piv * n + c] == 0.0) throw std::invalid_argument("degenerate simplex");
    if (piv != c)
      for (int k = 0; k < n; ++k) {
        std::swap(m[piv * n + k], m[c * n + k]);
        std::swap(inv[piv * n + k], inv[c * n + k]);
      }
    const double d = m[c * n + c];
    for (int k = 0; k < n; ++k) {
      m[c * n + k] /= d;
      inv[c * n + k] /= d;
    }
    for (int r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = m[r * n + c];
      if (f == 0.0) continue;
      for (int k = 0; k < n; ++k) {
        m[r * n + k] -= f * m[c * n + k];
        inv[r * n + k] -= f * inv[c * n + k];
      }
    }
  }
  m = inv;
}

}  // namespace

SimplicialMesh::SimplicialMesh(int dim, std::vector<double> vertices, std::vector<int> simplices)
    : dim_(dim), vertices_(std::move(vertices)), simplices_(std::move(simplices)) {
  if (dim_ < 1 || dim_ > 3) throw std::invalid_argument("mesh: ambient dimension must be 1..3");
  if (vertices_.size() % dim_ != 0 || simplices_.size() % (dim_ + 1) != 0)
    throw std::invalid_argument("mesh: flat array size mismatch");
  const int nv = vertex_count(), ns = simplex_count();
  patches_.resize(nv);
  for (int s = 0; s < ns; ++s)
    for (int k = 0; k <= dim_; ++k) {
      const int v = simplex(s)[k];
      if (v < 0 || v >= nv) throw std::invalid_argument("mesh: vertex index out of range");
      patches_[v].push_back(s);
    }

  for (int a = 0; a < dim_; ++a) {
    bb_lo_[a] = bb_hi_[a] = vertices_[a];
  }
  for (int v = 0; v < nv; ++v)
    for (int a = 0; a < dim_; ++a) {
      bb_lo_[a] = std::min(bb_lo_[a], vertex(v)[a]);
      bb_hi_[a] = std::max(bb_hi_[a], vertex(v)[a]);
    }

  // Barycentric rows: lambda_k(z) = off + coef . z per simplex.
  bary_rows_.assign(static_cast<std::size_t>(ns) * (dim_ + 1) * (dim_ + 1), 0.0);
  std::vector<double> edge(dim_ * dim_);
  for (int s = 0; s < ns; ++s) {
    const int* vs = simplex(s);
    for (int c = 0; c < dim_; ++c)
      for (int r = 0; r < dim_; ++r)
        edge[r * dim_ + c] = vertex(vs[c + 1])[r] - vertex(vs[0])[r];
    invert_small(dim_, edge);  // rows of the inverse are grad(lambda_{k+1})
    double* rows = bary_rows_.data() + static_cast<std::size_t>(s) * (dim_ + 1) * (dim_ + 1);
    // k = 1..dim: coef = inv row (k-1), off = -coef . v0
    for (int k = 1; k <= dim_; ++k) {
      double off = 0.0;
      for (int a = 0; a < dim_; ++a) {
        const double c = edge[(k - 1) * dim_ + a];
        rows[k * (dim_ + 1) + a] = c;
        off -= c * vertex(vs[0])[a];
      }
      rows[k * (dim_ + 1) + dim_] = off;
    }
    // lambda_0 = 1 - sum of the others
    for (int a = 0; a <= dim_; ++a) {
      double acc = a == dim_ ? 1.0 : 0.0;
      for (int k = 1; k <= dim_; ++k) acc -= rows[k * (dim_ + 1) + a];
      rows[a] = acc;
    }
  }

  // Bin simplices by bounding box for point location.
  const int target = std::max(1, static_cast<int>(std::pow(static_cast<double>(ns), 1.0 / dim_)));
  long total_bins = 1;
  for (int a = 0; a < dim_; ++a) {
    bins_[a] = std::min(target, 256);
    total_bins *= bins_[a];
  }
  bin_simplices_.resize(total_bins);
  for (int s = 0; s < ns; ++s) {
    std::array<int, 3> blo{0, 0, 0}, bhi{0, 0, 0};
    for (int a = 0; a < dim_; ++a) {
      double lo = vertex(simplex(s)[0])[a], hi = lo;
      for (int k = 1; k <= dim_; ++k) {
        lo = std::min(lo, vertex(simplex(s)[k])[a]);
        hi = std::max(hi, vertex(simplex(s)[k])[a]);
      }
      const double span = std::max(bb_hi_[a] - bb_lo_[a], 1e-300);
      blo[a] = std::clamp(static_cast<int>((lo - bb_lo_[a]) / span * bins_[a] - 1e-9), 0, bins_[a] - 1);
      bhi[a] = std::clamp(static_cast<int>((hi - bb_lo_[a]) / span * bins_[a] + 1e-9), 0, bins_[a] - 1);
    }
    std::array<int, 3> it = blo;
    for (;;) {
      long bin = 0;
      for (int a = 0; a < dim_; ++a) bin = bin * bins_[a] + it[a];
      bin_simplices_[bin].push_back(s);
      int a = dim_ - 1;
      for (; a >= 0; --a) {
        if (++it[a] <= bhi[a]) break;
        it[a] = blo[a];
      }
      if (a < 0) break;
    }
  }
  // Candidate lists are scanned in index order so face ties resolve to the
  // lowest simplex index.
  for (auto& lst : bin_simplices_) std::sort(lst.begin(), lst.end());
}

int SimplicialMesh::max_patch_size() const {
  std::size_t m = 0;
  for (const auto& p : patches_) m = std::max(m, p.size());
  return static_cast<int>(m);
}

long SimplicialMesh::bin_of(const double* z) const {
  long bin = 0;
  for (int a = 0; a < dim_; ++a) {
    const double span = std::max(bb_hi_[a] - bb_lo_[a], 1e-300);
    int i = static_cast<int>((z[a] - bb_lo_[a]) / span * bins_[a]);
    i = std::clamp(i, 0, bins_[a] - 1);
    bin = bin * bins_[a] + i;
  }
  return bin;
}

int SimplicialMesh::locate(const double* z, double* bary) const {
  for (int a = 0; a < dim_; ++a) {
    const double tol = 1e-12 * std::max(1.0, std::abs(bb_hi_[a]) + std::abs(bb_lo_[a]));
    if (z[a] < bb_lo_[a] - tol || z[a] > bb_hi_[a] + tol) return -1;
  }
  const auto& cands = bin_simplices_[bin_of(z)];
  for (int s : cands) {
    const double* rows = bary_rows_.data() + static_cast<std::size_t>(s) * (dim_ + 1) * (dim_ + 1);
    bool inside = true;
    for (int k = 0; k <= dim_ && inside; ++k) {
      double lam = rows[k * (dim_ + 1) + dim_];
      for (int a = 0; a < dim_; ++a) lam += rows[k * (dim_ + 1) + a] * z[a];
      bary[k] = lam;
      if (lam < -kBaryTol) inside = false;
    }
    if (inside) return s;
  }
  return -1;
}

void SimplicialMesh::barycentric_affine(int s, int k, double* coef, double& off) const {
  const double* rows = bary_rows_.data() + static_cast<std::size_t>(s) * (dim_ + 1) * (dim_ + 1);
  for (int a = 0; a < dim_; ++a) coef[a] = rows[k * (dim_ + 1) + a];
  off = rows[k * (dim_ + 1) + dim_];
}

SimplicialMesh make_interval_mesh(std::span<const double> breaks) {
  if (breaks.size() < 2) throw std::invalid_argument("interval mesh: need >= 2 breakpoints");
  std::vector<double> verts(breaks.begin(), breaks.end());
  std::vector<int> simp;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    simp.push_back(static_cast<int>(i));
    simp.push_back(static_cast<int>(i + 1));
  }
  return SimplicialMesh(1, std::move(verts), std::move(simp));
}

SimplicialMesh make_tensor_tri_mesh(std::span<const double> xs, std::span<const double> ts,
                                    std::span<const double> row_shift) {
  const int nx = static_cast<int>(xs.size()), nt = static_cast<int>(ts.size());
  if (nx < 2 || nt < 2) throw std::invalid_argument("tensor mesh: need >= 2 breakpoints per axis");
  if (!row_shift.empty() && static_cast<int>(row_shift.size()) != nt)
    throw std::invalid_argument("tensor mesh: row_shift size mismatch");
  std::vector<double> verts;
  verts.reserve(static_cast<std::size_t>(nx) * nt * 2);
  for (int j = 0; j < nt; ++j)
    for (int i = 0; i < nx; ++i) {
      const double shift = row_shift.empty() ? 0.0 : row_shift[j];
      verts.push_back(xs[i] + shift);
      verts.push_back(ts[j]);
    }
  auto vid = [nx](int i, int j) { return j * nx + i; };
  std::vector<int> simp;
  for (int j = 0; j + 1 < nt; ++j)
    for (int i = 0; i + 1 < nx; ++i) {
      simp.insert(simp.end(), {vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)});
      simp.insert(simp.end(), {vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)});
    }
  return SimplicialMesh(2, std::move(verts), std::move(simp));
}

SimplicialMesh make_crisscross_mesh(std::span<const double> xs, std::span<const double> ys) {
  const int nx = static_cast<int>(xs.size()), ny = static_cast<int>(ys.size());
  if (nx < 2 || ny < 2) throw std::invalid_argument("crisscross mesh: need >= 2 breakpoints per axis");
  std::vector<double> verts;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      verts.push_back(xs[i]);
      verts.push_back(ys[j]);
    }
  const int grid_count = nx * ny;
  auto vid = [nx](int i, int j) { return j * nx + i; };
  auto cid = [&](int i, int j) { return grid_count + j * (nx - 1) + i; };
  for (int j = 0; j + 1 < ny; ++j)
    for (int i = 0; i + 1 < nx; ++i) {
      verts.push_back(0.5 * (xs[i] + xs[i + 1]));
      verts.push_back(0.5 * (ys[j] + ys[j + 1]));
    }
  std::vector<int> simp;
  for (int j = 0; j + 1 < ny; ++j)
    for (int i = 0; i + 1 < nx; ++i) {
      const int c = cid(i, j);
      simp.insert(simp.end(), {vid(i, j), vid(i + 1, j), c});
      simp.insert(simp.end(), {vid(i + 1, j), vid(i + 1, j + 1), c});
      simp.insert(simp.end(), {vid(i + 1, j + 1), vid(i, j + 1), c});
      simp.insert(simp.end(), {vid(i, j + 1), vid(i, j), c});
    }
  return SimplicialMesh(2, std::move(verts), std::move(simp));
}

CpwlFunction::CpwlFunction(std::shared_ptr<const SimplicialMesh> mesh, std::vector<double> nodal)
    : mesh_(std::move(mesh)), nodal_(std::move(nodal)) {
  if (static_cast<int>(nodal_.size()) != mesh_->vertex_count())
    throw std::invalid_argument("cpwl: nodal value count mismatch");
}

double CpwlFunction::sup_nodal() const {
  double m = 0.0;
  for (double v : nodal_) m = std::max(m, std::abs(v));
  return m;
}

double CpwlFunction::eval(const double* z) const {
  double bary[4];
  const int s = mesh_->locate(z, bary);
  if (s < 0) throw std::domain_error("cpwl: point outside the mesh");
  const int* vs = mesh_->simplex(s);
  double v = 0.0;
  for (int k = 0; k <= mesh_->dim(); ++k) v += bary[k] * nodal_[vs[k]];
  return v;
}

void CpwlFunction::eval_grad(const double* z, double& value, double* grad) const {
  double bary[4];
  const int s = mesh_->locate(z, bary);
  if (s < 0) throw std::domain_error("cpwl: point outside the mesh");
  const int* vs = mesh_->simplex(s);
  value = 0.0;
  for (int a = 0; a < mesh_->dim(); ++a) grad[a] = 0.0;
  double coef[3];
  double off;
  for (int k = 0; k <= mesh_->dim(); ++k) {
    value += bary[k] * nodal_[vs[k]];
    mesh_->barycentric_affine(s, k, coef, off);
    for (int a = 0; a < mesh_->dim(); ++a) grad[a] += nodal_[vs[k]] * coef[a];
  }
}

double smooth_min(double r, double s, double tau) {
  const double d = r - s;
  return 0.5 * (r + s) - 0.5 * d * std::tanh(tau * d);
}

double smooth_max(double r, double s, double tau) {
  const double d = r - s;
  return 0.5 * (r + s) + 0.5 * d * std::tanh(tau * d);
}

double psi_tau(double tau, double r) {
  const double t = std::tanh(tau * r);
  return t + tau * r * (1.0 - t * t);
}

int MinMaxExpr::depth() const {
  std::vector<int> d(nodes.size(), 1);
  int out = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {  // children precede parents
    if (nodes[i].kind != kLeaf) d[i] = 1 + std::max(d[nodes[i].a], d[nodes[i].b]);
    out = std::max(out, d[i]);
  }
  return out;
}

int MinMaxExpr::leaf_count() const {
  int n = 0;
  for (const auto& nd : nodes) n += nd.kind == kLeaf;
  return n;
}

double MinMaxExpr::eval(const double* z) const {
  std::vector<double> v(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const Node& nd = nodes[i];
    if (nd.kind == kLeaf) {
      double acc = nd.off;
      for (int a = 0; a < dim; ++a) acc += nd.coef[a] * z[a];
      v[i] = acc;
    } else if (nd.kind == kMin) {
      v[i] = std::min(v[nd.a], v[nd.b]);
    } else {
      v[i] = std::max(v[nd.a], v[nd.b]);
    }
  }
  return v[root];
}

double MinMaxExpr::eval_smoothed(const double* z, double tau) const {
  std::vector<double> v(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const Node& nd = nodes[i];
    if (nd.kind == kLeaf) {
      double acc = nd.off;
      for (int a = 0; a < dim; ++a) acc += nd.coef[a] * z[a];
      v[i] = acc;
    } else if (nd.kind == kMin) {
      v[i] = smooth_min(v[nd.a], v[nd.b], tau);
    } else {
      v[i] = smooth_max(v[nd.a], v[nd.b], tau);
    }
  }
  return v[root];
}

void MinMaxExpr::eval_smoothed_grad(const double* z, double tau, double& value,
                                    double* grad) const {
  std::vector<double> v(nodes.size());
  std::vector<std::array<double, 3>> g(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const Node& nd = nodes[i];
    if (nd.kind == kLeaf) {
      double acc = nd.off;
      for (int a = 0; a < dim; ++a) acc += nd.coef[a] * z[a];
      v[i] = acc;
      g[i] = nd.coef;
    } else {
      const double va = v[nd.a], vb = v[nd.b];
      const double d = va - vb;
      const double psi = psi_tau(tau, d);
      const double sign = nd.kind == kMin ? -1.0 : 1.0;
      v[i] = 0.5 * (va + vb) + sign * 0.5 * d * std::tanh(tau * d);
      const double wa = 0.5 + sign * 0.5 * psi;
      const double wb = 0.5 - sign * 0.5 * psi;
      for (int a = 0; a < dim; ++a) g[i][a] = wa * g[nd.a][a] + wb * g[nd.b][a];
    }
  }
  value = v[root];
  for (int a = 0; a < dim; ++a) grad[a] = g[root][a];
}

namespace {

void leaf_interval(const SimplicialMesh& mesh, MinMaxExpr::Node& nd) {
  double lo = nd.off, hi = nd.off;
  for (int a = 0; a < mesh.dim(); ++a) {
    const double c = nd.coef[a];
    if (c >= 0.0) {
      lo += c * mesh.bbox_lo()[a];
      hi += c * mesh.bbox_hi()[a];
    } else {
      lo += c * mesh.bbox_hi()[a];
      hi += c * mesh.bbox_lo()[a];
    }
  }
  nd.lo = lo;
  nd.hi = hi;
}

}  // namespace

MinMaxExpr hat_minmax_expr(const SimplicialMesh& mesh, int vertex) {
  if (vertex < 0 || vertex >= mesh.vertex_count())
    throw std::invalid_argument("hat_minmax_expr: vertex out of range");
  const auto& patch = mesh.patch(vertex);
  if (patch.empty()) throw std::invalid_argument("hat_minmax_expr: isolated vertex");

  MinMaxExpr e;
  e.dim = mesh.dim();
  std::vector<int> level;  // current tree level node ids
  for (int s : patch) {
    MinMaxExpr::Node nd;
    nd.kind = MinMaxExpr::kLeaf;
    int local = -1;
    for (int k = 0; k <= mesh.dim(); ++k)
      if (mesh.simplex(s)[k] == vertex) local = k;
    double coef[3];
    double off;
    mesh.barycentric_affine(s, local, coef, off);
    for (int a = 0; a < mesh.dim(); ++a) nd.coef[a] = coef[a];
    nd.off = off;
    leaf_interval(mesh, nd);
    level.push_back(static_cast<int>(e.nodes.size()));
    e.nodes.push_back(nd);
  }
  // Balanced min tree over the patch extensions.
  while (level.size() > 1) {
    std::vector<int> next;
    for (std::size_t i = 0; i + 1 < level.size(); i += 2) {
      MinMaxExpr::Node nd;
      nd.kind = MinMaxExpr::kMin;
      nd.a = level[i];
      nd.b = level[i + 1];
      nd.lo = std::min(e.nodes[nd.a].lo, e.nodes[nd.b].lo);
      nd.hi = std::min(e.nodes[nd.a].hi, e.nodes[nd.b].hi);
      next.push_back(static_cast<int>(e.nodes.size()));
      e.nodes.push_back(nd);
    }
    if (level.size() % 2 == 1) next.push_back(level.back());
    level = std::move(next);
  }
  int m = level[0];
  if (e.nodes[m].lo < 0.0) {
    MinMaxExpr::Node zero;
    zero.kind = MinMaxExpr::kLeaf;
    zero.off = 0.0;
    zero.lo = zero.hi = 0.0;
    const int zid = static_cast<int>(e.nodes.size());
    e.nodes.push_back(zero);
    MinMaxExpr::Node nd;
    nd.kind = MinMaxExpr::kMax;
    nd.a = zid;
    nd.b = m;
    nd.lo = std::max(0.0, e.nodes[m].lo);
    nd.hi = std::max(0.0, e.nodes[m].hi);
    m = static_cast<int>(e.nodes.size());
    e.nodes.push_back(nd);
  }
  e.root = m;

  // Lagrange check on the vertices of the patch simplices and their
  // neighborhoods; catches non-representable (non-convex) patches.
  for (int s : patch)
    for (int k = 0; k <= mesh.dim(); ++k) {
      const int v = mesh.simplex(s)[k];
      const double want = v == vertex ? 1.0 : 0.0;
      if (std::abs(e.eval(mesh.vertex(v)) - want) > 1e-9)
        throw std::invalid_argument("hat_minmax_expr: patch is not min-max representable");
    }
  return e;
}

}  // namespace entnet
