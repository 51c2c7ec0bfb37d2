#include "entnet/grid.hpp"

#include <cmath>
#include <stdexcept>

#include "entnet/parallel.hpp"

namespace entnet {

QuadGrid::QuadGrid(std::vector<double> lo, std::vector<double> hi, double t_final,
                   std::vector<int> n_cells_x, int n_cells_t, int oversample,
                   double t_start)
    : dim_(static_cast<int>(lo.size())), q_(oversample) {
  if (dim_ < 1 || dim_ > kMaxDim) throw std::invalid_argument("grid: unsupported spatial dimension");
  if (hi.size() != lo.size() || n_cells_x.size() != lo.size())
    throw std::invalid_argument("grid: lo/hi/n_cells_x size mismatch");
  if (!(t_final > t_start)) throw std::invalid_argument("grid: t_final must exceed t_start");
  if (n_cells_t < 1) throw std::invalid_argument("grid: n_cells_t must be >= 1");
  if (q_ < 1) throw std::invalid_argument("grid: oversample must be >= 1");

  lo_ = lo;
  hi_ = hi;
  cells_ = n_cells_x;
  lo_.push_back(t_start);
  hi_.push_back(t_final);
  cells_.push_back(n_cells_t);

  spacing_.resize(axes());
  h_ = 0.0;
  cell_volume_ = 1.0;
  total_measure_ = 1.0;
  node_count_ = 1;
  cell_count_ = 1;
  for (int a = 0; a < axes(); ++a) {
    if (!(hi_[a] > lo_[a])) throw std::invalid_argument("grid: nonpositive extent");
    if (cells_[a] < 1) throw std::invalid_argument("grid: cell count must be >= 1");
    spacing_[a] = (hi_[a] - lo_[a]) / cells_[a];
    h_ += spacing_[a] * spacing_[a];
    cell_volume_ *= spacing_[a];
    total_measure_ *= hi_[a] - lo_[a];
    node_count_ *= nodes_on_axis(a);
    cell_count_ *= cells_[a];
  }
  h_ = std::sqrt(h_);

  build_node_refs();
  build_boundary_nodes();
}

double QuadGrid::axis_node_weight(int a, int i) const {
  const double dz = node_spacing(a);
  const int last = nodes_on_axis(a) - 1;
  return (i == 0 || i == last) ? 0.5 * dz : dz;
}

Pt QuadGrid::node_point(long n) const {
  Pt z{};
  for (int a = axes() - 1; a >= 0; --a) {
    const long na = nodes_on_axis(a);
    const long i = n % na;
    n /= na;
    z[a] = lo_[a] + static_cast<double>(i) * node_spacing(a);
  }
  return z;
}

double QuadGrid::node_weight(long n) const {
  double w = 1.0;
  for (int a = axes() - 1; a >= 0; --a) {
    const long na = nodes_on_axis(a);
    const int i = static_cast<int>(n % na);
    n /= na;
    w *= axis_node_weight(a, i);
  }
  return w;
}

CellIndex QuadGrid::cell_of(const Pt& z) const {
  CellIndex c;
  for (int a = 0; a < axes(); ++a) {
    const double span = hi_[a] - lo_[a];
    const double tol = 1e-12 * span;
    if (z[a] < lo_[a] - tol || z[a] > hi_[a] + tol)
      throw std::domain_error("point outside the space-time domain");
    int i = static_cast<int>(std::floor((z[a] - lo_[a]) / spacing_[a]));
    if (i < 0) i = 0;
    if (i > cells_[a] - 1) i = cells_[a] - 1;
    if (a < dim_)
      c.ix[a] = i;
    else
      c.it = i;
  }
  return c;
}

long QuadGrid::cell_flat(const CellIndex& c) const {
  long flat = 0;
  for (int a = 0; a < axes(); ++a) {
    const int i = a < dim_ ? c.ix[a] : c.it;
    flat = flat * cells_[a] + i;
  }
  return flat;
}

CellIndex QuadGrid::cell_unflat(long flat) const {
  CellIndex c;
  for (int a = axes() - 1; a >= 0; --a) {
    const int i = static_cast<int>(flat % cells_[a]);
    flat /= cells_[a];
    if (a < dim_)
      c.ix[a] = i;
    else
      c.it = i;
  }
  return c;
}

long QuadGrid::cell_corner_node(long cell, int corner) const {
  const CellIndex c = cell_unflat(cell);
  long idx = 0;
  for (int a = 0; a < axes(); ++a) {
    const int ci = a < dim_ ? c.ix[a] : c.it;
    const int bit = (corner >> a) & 1;
    idx = idx * nodes_on_axis(a) + static_cast<long>(ci + bit) * q_;
  }
  return idx;
}

void QuadGrid::build_node_refs() {
  node_refs_.resize(node_count_);
  for (long n = 0; n < node_count_; ++n) {
    long rem = n;
    std::array<int, kMaxDim + 1> idx{};
    for (int a = axes() - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(rem % nodes_on_axis(a));
      rem /= nodes_on_axis(a);
    }
    NodeRef ref{};
    long cell = 0;
    for (int a = 0; a < axes(); ++a) {
      int owner = idx[a] / q_;
      if (owner > cells_[a] - 1) owner = cells_[a] - 1;
      ref.xi[a] = static_cast<double>(idx[a] - owner * q_) / q_;
      cell = cell * cells_[a] + owner;
    }
    ref.cell = cell;
    node_refs_[n] = ref;
  }
}

void QuadGrid::build_boundary_nodes() {
  // t = t_lo plane with spatial trapezoid weights.
  {
    long count = 1;
    for (int a = 0; a < dim_; ++a) count *= nodes_on_axis(a);
    initial_nodes_.reserve(count);
    for (long n = 0; n < count; ++n) {
      long rem = n;
      Pt z{};
      double w = 1.0;
      for (int a = dim_ - 1; a >= 0; --a) {
        const int i = static_cast<int>(rem % nodes_on_axis(a));
        rem /= nodes_on_axis(a);
        z[a] = lo_[a] + static_cast<double>(i) * node_spacing(a);
        w *= axis_node_weight(a, i);
      }
      z[dim_] = lo_[dim_];
      initial_nodes_.push_back({z, w});
    }
  }
  // Lateral boundary: for each spatial axis and side, trapezoid over the
  // remaining spatial axes and time. Fixed ordering: axis, then lo/hi side,
  // then lexicographic.
  for (int fixed = 0; fixed < dim_; ++fixed) {
    for (int side = 0; side < 2; ++side) {
      std::vector<int> free_axes;
      for (int a = 0; a < axes(); ++a)
        if (a != fixed) free_axes.push_back(a);
      long count = 1;
      for (int a : free_axes) count *= nodes_on_axis(a);
      for (long n = 0; n < count; ++n) {
        long rem = n;
        Pt z{};
        double w = 1.0;
        for (int k = static_cast<int>(free_axes.size()) - 1; k >= 0; --k) {
          const int a = free_axes[k];
          const int i = static_cast<int>(rem % nodes_on_axis(a));
          rem /= nodes_on_axis(a);
          z[a] = lo_[a] + static_cast<double>(i) * node_spacing(a);
          w *= axis_node_weight(a, i);
        }
        z[fixed] = side == 0 ? lo_[fixed] : hi_[fixed];
        lateral_nodes_.push_back({z, w});
      }
    }
  }
}

double integrate(const QuadGrid& grid, std::span<const double> samples) {
  if (static_cast<long>(samples.size()) != grid.node_count())
    throw std::invalid_argument("integrate: sample/node count mismatch");
  return block_sum_indexed(samples.size(), [&](std::size_t i) {
    return grid.node_weight(static_cast<long>(i)) * samples[i];
  });
}

}  // namespace entnet
