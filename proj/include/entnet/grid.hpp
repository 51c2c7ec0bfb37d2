#pragma once

#include <array>
#include <span>
#include <vector>

#include "entnet/flux.hpp"

namespace entnet {

// Space-time point (x..., t); unused trailing components are zero.
using Pt = std::array<double, kMaxDim + 1>;

struct CellIndex {
  std::array<int, kMaxDim> ix{};
  int it = 0;
};

// Uniform tensor-product space-time grid. Doubles as the background mesh
// Lambda_h (cells) and as the trapezoidal quadrature grid (nodes). With
// oversample q >= 1 there are q quadrature intervals per cell per axis;
// q = 1 places quadrature nodes exactly at cell corners.
//
// Axis order: spatial axes 0..d-1, then time. Node/cell flattening is
// lexicographic with the time axis fastest.
class QuadGrid {
 public:
  QuadGrid(std::vector<double> lo, std::vector<double> hi, double t_final,
           std::vector<int> n_cells_x, int n_cells_t, int oversample = 1,
           double t_start = 0.0);

  int dim() const { return dim_; }
  int axes() const { return dim_ + 1; }
  int oversample() const { return q_; }

  double axis_lo(int a) const { return lo_[a]; }
  double axis_hi(int a) const { return hi_[a]; }
  int cells(int a) const { return cells_[a]; }
  int nodes_on_axis(int a) const { return cells_[a] * q_ + 1; }
  double cell_spacing(int a) const { return spacing_[a]; }
  double node_spacing(int a) const { return spacing_[a] / q_; }
  double t_lo() const { return lo_[dim_]; }
  double t_hi() const { return hi_[dim_]; }

  double h() const { return h_; }  // cell diagonal; all cells congruent
  double cell_volume() const { return cell_volume_; }
  double total_measure() const { return total_measure_; }

  long node_count() const { return node_count_; }
  long cell_count() const { return cell_count_; }

  Pt node_point(long n) const;
  double node_weight(long n) const;

  // Floor-based lookup; points on shared faces belong to the larger-index
  // cell, clamped into range at the domain boundary. Throws std::domain_error
  // outside the closure of the domain.
  CellIndex cell_of(const Pt& z) const;
  long cell_flat(const CellIndex& c) const;
  CellIndex cell_unflat(long c) const;

  // Node index of a cell corner; corner bit a set = upper corner on axis a.
  long cell_corner_node(long cell, int corner) const;
  int corners_per_cell() const { return 1 << axes(); }

  // Owner cell of a quadrature node under the face tie-break, plus local
  // coordinates xi in [0,1]^axes within that cell.
  struct NodeRef {
    long cell;
    std::array<double, kMaxDim + 1> xi;
  };
  const NodeRef& node_ref(long n) const { return node_refs_[n]; }

  struct BNode {
    Pt z;
    double w;
  };
  // Quadrature over Omega x {t_lo} (spatial trapezoid weights).
  const std::vector<BNode>& initial_nodes() const { return initial_nodes_; }
  // Quadrature over the lateral boundary dOmega x (t_lo, t_hi).
  const std::vector<BNode>& lateral_nodes() const { return lateral_nodes_; }

 private:
  void build_node_refs();
  void build_boundary_nodes();
  double axis_node_weight(int a, int i) const;

  int dim_;
  int q_;
  std::vector<double> lo_, hi_, spacing_;
  std::vector<int> cells_;
  double h_, cell_volume_, total_measure_;
  long node_count_, cell_count_;
  std::vector<NodeRef> node_refs_;
  std::vector<BNode> initial_nodes_, lateral_nodes_;
};

// Trapezoidal quadrature: sum of weight * sample in a fixed block-folded
// order; bitwise reproducible for a fixed grid, independent of threads.
// Throws std::invalid_argument on a sample/node count mismatch.
double integrate(const QuadGrid& grid, std::span<const double> samples);

}  // namespace entnet
