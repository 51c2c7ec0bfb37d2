#pragma once

#include <array>
#include <memory>
#include <span>
#include <vector>

#include "entnet/loss.hpp"
#include "entnet/network.hpp"
#include "entnet/problems.hpp"

namespace entnet {

// Conforming simplicial mesh in ambient dimension 1..3 with per-vertex patch
// lists, per-simplex barycentric data, and binned point location.
class SimplicialMesh {
 public:
  SimplicialMesh(int dim, std::vector<double> vertices /*flat [n][dim]*/,
                 std::vector<int> simplices /*flat [m][dim+1]*/);

  int dim() const { return dim_; }
  int vertex_count() const { return static_cast<int>(vertices_.size() / dim_); }
  int simplex_count() const { return static_cast<int>(simplices_.size() / (dim_ + 1)); }
  const double* vertex(int v) const { return vertices_.data() + static_cast<std::size_t>(v) * dim_; }
  const int* simplex(int s) const { return simplices_.data() + static_cast<std::size_t>(s) * (dim_ + 1); }
  const std::vector<int>& patch(int v) const { return patches_[v]; }
  int max_patch_size() const;
  const double* bbox_lo() const { return bb_lo_.data(); }
  const double* bbox_hi() const { return bb_hi_.data(); }

  // Containing simplex (lowest index on ties) and its barycentric
  // coordinates; -1 if z is outside the mesh.
  int locate(const double* z, double* bary) const;

  // Barycentric coordinate of local vertex k in simplex s as an affine
  // function lambda(z) = off + coef . z.
  void barycentric_affine(int s, int k, double* coef, double& off) const;

 private:
  int dim_;
  std::vector<double> vertices_;
  std::vector<int> simplices_;
  std::vector<std::vector<int>> patches_;
  std::vector<double> bary_rows_;  // per simplex: (dim+1) x (dim coef + off)
  std::array<double, 3> bb_lo_{}, bb_hi_{};
  // uniform bins over the bbox
  std::array<int, 3> bins_{1, 1, 1};
  std::vector<std::vector<int>> bin_simplices_;
  long bin_of(const double* z) const;
};

// Structured meshes used by the tests and the shock competitor.
SimplicialMesh make_interval_mesh(std::span<const double> breaks);
// Tensor-product triangulation, each quad split by the (i,j)-(i+1,j+1)
// diagonal; row j is sheared horizontally by row_shift[j].
SimplicialMesh make_tensor_tri_mesh(std::span<const double> xs, std::span<const double> ts,
                                    std::span<const double> row_shift);
// Criss-cross pattern: both diagonals per quad with a center vertex.
SimplicialMesh make_crisscross_mesh(std::span<const double> xs, std::span<const double> ys);

// Continuous piecewise linear function: nodal values on a simplicial mesh.
class CpwlFunction {
 public:
  CpwlFunction(std::shared_ptr<const SimplicialMesh> mesh, std::vector<double> nodal);

  const SimplicialMesh& mesh() const { return *mesh_; }
  std::shared_ptr<const SimplicialMesh> mesh_ptr() const { return mesh_; }
  std::span<const double> nodal() const { return nodal_; }
  double sup_nodal() const;

  double eval(const double* z) const;  // throws std::domain_error outside
  void eval_grad(const double* z, double& value, double* grad) const;

 private:
  std::shared_ptr<const SimplicialMesh> mesh_;
  std::vector<double> nodal_;
};

// Adapts a CPwL function on a (d+1)-dimensional space-time mesh to the loss
// module's Field interface.
class CpwlField : public Field {
 public:
  explicit CpwlField(const CpwlFunction& f) : f_(f) {}
  void eval(const Pt& z, double& value, double* grad) const override {
    f_.eval_grad(z.data(), value, grad);
  }

 private:
  const CpwlFunction& f_;
};

// Expression tree of binary min/max over affine leaves.
struct MinMaxExpr {
  enum Kind { kLeaf, kMin, kMax };
  struct Node {
    Kind kind = kLeaf;
    int a = -1, b = -1;
    std::array<double, 3> coef{};  // leaf only
    double off = 0.0;
    double lo = 0.0, hi = 0.0;  // value interval over the mesh bbox
  };
  int dim = 0;
  int root = -1;
  std::vector<Node> nodes;

  int depth() const;
  int leaf_count() const;
  double eval(const double* z) const;
  double eval_smoothed(const double* z, double tau) const;
  void eval_smoothed_grad(const double* z, double tau, double& value, double* grad) const;
};

// Smoothed binary operations and their derivative kernel.
double smooth_min(double r, double s, double tau);
double smooth_max(double r, double s, double tau);
double psi_tau(double tau, double r);  // tanh(tau r) + tau r sech^2(tau r)

// Min-max affine representation of the nodal hat function phi_j, with depth
// O(log2 patch size): max(0, min over the patch of the per-simplex affine
// extensions). Requires the (convex) patches of the meshes built above;
// construction is verified on the mesh vertices and throws on failure.
MinMaxExpr hat_minmax_expr(const SimplicialMesh& mesh, int vertex);

struct CompileTraceRow {
  double tau;
  double sup_error;
  double w11_error;
};

struct CompiledCpwl {
  ClippedTanhNet net;
  std::vector<CompileTraceRow> trace;
  double tau_final = 0.0;
};

// Realizes sum_j u(N_j) * smooth(hat_j, tau) as one clipped tanh network and
// doubles tau from 16 until the sup error against u_hat on a fixed 10^4-point
// quasi-random sample meets tol (cap tau = 2^20; failure throws
// std::runtime_error with the trace in the message). clip_c = 0 selects
// 2*(sup|u_hat| + 1). Globally affine inputs compile exactly.
CompiledCpwl compile_cpwl_to_net(const CpwlFunction& u_hat, double tol, double clip_c = 0.0);

// Single-tau network (no search); exposed for the tau-trace oracles.
ClippedTanhNet build_cpwl_net(const CpwlFunction& u_hat, double tau, double clip_c = 0.0);

// Shock-adapted competitor for the 1D single-shock Riemann benchmarks:
// an eps = h^2 strip around the shock line, one-sided exact states outside,
// linear transition inside. Throws std::invalid_argument for other
// benchmarks or when h is too large for the strip to fit.
CpwlFunction build_shock_competitor(const BenchmarkProblem& problem, double h);

}  // namespace entnet
