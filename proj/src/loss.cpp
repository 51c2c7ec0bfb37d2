#include "entnet/loss.hpp"

#include <cmath>
#include <stdexcept>

#include "entnet/parallel.hpp"

namespace entnet {
namespace {

inline double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

inline double residual_of(const FluxModel& flux, int dim, double u, const double* grad) {
  double r = grad[dim];  // time derivative
  for (int i = 0; i < dim; ++i) r += flux.f_prime(u, i) * grad[i];
  return r;
}

constexpr long kNodeBlock = 1024;
constexpr int kCandBlock = 8;

}  // namespace

double residual_at(const Field& field, const FluxModel& flux, const Pt& z) {
  double u, g[kMaxDim + 1] = {0, 0, 0};
  field.eval(z, u, g);
  return residual_of(flux, flux.dim, u, g);
}

NodalField eval_nodal(const Field& field, const FluxModel& flux, const QuadGrid& grid) {
  NodalField nf;
  const long n = grid.node_count();
  nf.value.resize(n);
  nf.residual.resize(n);
  const int n_blocks = static_cast<int>((n + kNodeBlock - 1) / kNodeBlock);
  ThreadPool::global().run_blocks(n_blocks, [&](int b) {
    const long b0 = static_cast<long>(b) * kNodeBlock;
    const long b1 = std::min(n, b0 + kNodeBlock);
    double g[kMaxDim + 1];
    for (long i = b0; i < b1; ++i) {
      g[0] = g[1] = g[2] = 0.0;
      double u;
      field.eval(grid.node_point(i), u, g);
      nf.value[i] = u;
      nf.residual[i] = residual_of(flux, grid.dim(), u, g);
    }
  });
  return nf;
}

double j_ent(const NodalField& nf, const QuadGrid& grid, const DpwpFunction& k) {
  if (&k.grid() != &grid)
    throw std::invalid_argument("j_ent: candidate lives on a different grid");
  return block_sum_indexed(static_cast<std::size_t>(grid.node_count()), [&](std::size_t i) {
    const auto& ref = grid.node_ref(static_cast<long>(i));
    const double kv = k.eval_in_cell(ref.cell, ref.xi);
    return grid.node_weight(static_cast<long>(i)) * nf.residual[i] * sgn(nf.value[i] - kv);
  });
}

double j_ent(const Field& field, const FluxModel& flux, const DpwpFunction& k,
             const QuadGrid& grid) {
  return j_ent(eval_nodal(field, flux, grid), grid, k);
}

std::pair<double, int> l_ent_hat(const NodalField& nf, const QuadGrid& grid,
                                 std::span<const DpwpFunction> candidates) {
  if (candidates.empty()) throw std::invalid_argument("l_ent_hat: empty candidate list");
  std::vector<double> scores(candidates.size());
  const int n_blocks =
      static_cast<int>((candidates.size() + kCandBlock - 1) / kCandBlock);
  ThreadPool::global().run_blocks(n_blocks, [&](int b) {
    const std::size_t c0 = static_cast<std::size_t>(b) * kCandBlock;
    const std::size_t c1 = std::min(candidates.size(), c0 + kCandBlock);
    for (std::size_t c = c0; c < c1; ++c) scores[c] = j_ent(nf, grid, candidates[c]);
  });
  int best = 0;
  for (std::size_t c = 1; c < scores.size(); ++c)
    if (scores[c] > scores[best]) best = static_cast<int>(c);
  return {scores[best], best};
}

double l_reg(const NodalField& nf, const QuadGrid& grid, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("l_reg: h must be positive");
  return h * block_sum_indexed(static_cast<std::size_t>(grid.node_count()),
                               [&](std::size_t i) {
                                 return grid.node_weight(static_cast<long>(i)) *
                                        std::abs(nf.residual[i]);
                               });
}

std::pair<double, double> l_ibc(const Field& field, const SpaceTimeFn& u0,
                                const SpaceTimeFn* g, const QuadGrid& grid) {
  double gbuf[kMaxDim + 1];
  const auto& init = grid.initial_nodes();
  const double initial = block_sum_indexed(init.size(), [&](std::size_t i) {
    double u;
    field.eval(init[i].z, u, gbuf);
    return init[i].w * std::abs(u - u0(init[i].z));
  });
  const auto& lat = grid.lateral_nodes();
  const double boundary = block_sum_indexed(lat.size(), [&](std::size_t i) {
    double u;
    field.eval(lat[i].z, u, gbuf);
    const double gv = g ? (*g)(lat[i].z) : 0.0;
    return lat[i].w * std::abs(u - gv);
  });
  return {initial, boundary};
}

namespace {

// Streamed candidate scores: identical values to materializing the candidates
// with sample_perturbations and calling j_ent on each (same keyed draws, same
// interpolation loop, same block-folded reduction).
std::vector<double> streamed_scores(const NodalField& nf, const QuadGrid& grid,
                                    std::span<const double> avgs, const PertConfig& pert,
                                    std::uint64_t iteration,
                                    std::span<const double> wr) {
  const int n_total = pert.n_pert + (pert.augment_constants ? 2 : 0);
  std::vector<double> scores(n_total);
  const long n = grid.node_count();
  const int n_blocks = (n_total + kCandBlock - 1) / kCandBlock;
  ThreadPool::global().run_blocks(n_blocks, [&](int blk) {
    const int c0 = blk * kCandBlock;
    const int c1 = std::min(n_total, c0 + kCandBlock);
    for (int c = c0; c < c1; ++c) {
      const bool is_const = c >= pert.n_pert;
      const double const_val = c == pert.n_pert ? pert.clip_c : -pert.clip_c;
      scores[c] = block_sum_indexed(static_cast<std::size_t>(n), [&](std::size_t i) {
        const auto& ref = grid.node_ref(static_cast<long>(i));
        double kv;
        if (is_const) {
          kv = detail::q1_interp(grid.axes(), ref.xi, [&](int) { return const_val; });
        } else {
          const double avg = avgs[ref.cell];
          kv = detail::q1_interp(grid.axes(), ref.xi, [&](int a) {
            return avg + pert_eps(pert, iteration, c, ref.cell, a);
          });
        }
        return wr[i] * sgn(nf.value[i] - kv);
      });
    }
  });
  return scores;
}

LossBreakdown assemble_loss(const Field& field, const FluxModel& flux,
                            const SpaceTimeFn& u0, const SpaceTimeFn* g,
                            const PertConfig& pert,
                            const std::shared_ptr<const QuadGrid>& grid,
                            std::uint64_t iteration, NodalField& nf,
                            std::unique_ptr<DpwpFunction>* k_star_out) {
  nf = eval_nodal(field, flux, *grid);
  const std::vector<double> avgs = cell_average(*grid, nf.value);
  const long n = grid->node_count();
  std::vector<double> wr(n);
  for (long i = 0; i < n; ++i) wr[i] = grid->node_weight(i) * nf.residual[i];

  const std::vector<double> scores =
      streamed_scores(nf, *grid, avgs, pert, iteration, wr);
  int best = 0;
  for (std::size_t c = 1; c < scores.size(); ++c)
    if (scores[c] > scores[best]) best = static_cast<int>(c);

  LossBreakdown out;
  out.j_ent_star = scores[best];
  out.argmax_index = best;
  DpwpFunction k_star = materialize_candidate(grid, avgs, pert, iteration, best);
  out.argmax_norm = k_star.norm_w1inf();
  if (k_star_out) *k_star_out = std::make_unique<DpwpFunction>(std::move(k_star));

  out.l_reg = l_reg(nf, *grid, grid->h());
  const auto ibc = l_ibc(field, u0, g, *grid);
  out.l_ibc_initial = ibc.first;
  out.l_ibc_boundary = ibc.second;
  out.total = out.j_ent_star + out.l_reg + out.l_ibc_initial + out.l_ibc_boundary;
  return out;
}

}  // namespace

LossBreakdown total_loss(const Field& field, const FluxModel& flux,
                         const SpaceTimeFn& u0, const SpaceTimeFn* g,
                         const PertConfig& pert,
                         const std::shared_ptr<const QuadGrid>& grid,
                         std::uint64_t iteration) {
  NodalField nf;
  return assemble_loss(field, flux, u0, g, pert, grid, iteration, nf, nullptr);
}

LossBreakdown total_loss(const Field& field, const FluxModel& flux,
                         const BenchmarkProblem& problem, const PertConfig& pert,
                         const std::shared_ptr<const QuadGrid>& grid,
                         std::uint64_t iteration) {
  NodalField nf;
  return assemble_loss(field, flux, problem.u0, &problem.boundary_trace, pert, grid,
                       iteration, nf, nullptr);
}

LossBreakdown total_loss_with_argmax(const Field& field, const FluxModel& flux,
                                     const SpaceTimeFn& u0, const SpaceTimeFn* g,
                                     const PertConfig& pert,
                                     const std::shared_ptr<const QuadGrid>& grid,
                                     std::uint64_t iteration, NodalField& nf_out,
                                     std::unique_ptr<DpwpFunction>& k_star_out) {
  return assemble_loss(field, flux, u0, g, pert, grid, iteration, nf_out, &k_star_out);
}

std::vector<NodeTerm> loss_node_terms(const NodalField& nf, const QuadGrid& grid,
                                      const DpwpFunction& k_star, const Field& field,
                                      const SpaceTimeFn& u0, const SpaceTimeFn* g,
                                      double h) {
  std::vector<NodeTerm> terms;
  terms.reserve(static_cast<std::size_t>(grid.node_count()) + grid.initial_nodes().size() +
                grid.lateral_nodes().size());
  for (long i = 0; i < grid.node_count(); ++i) {
    const auto& ref = grid.node_ref(i);
    const double kv = k_star.eval_in_cell(ref.cell, ref.xi);
    const double w = grid.node_weight(i);
    const double wres = w * (sgn(nf.value[i] - kv) + h * sgn(nf.residual[i]));
    if (wres != 0.0) terms.push_back({grid.node_point(i), wres, 0.0});
  }
  double gbuf[kMaxDim + 1];
  for (const auto& bn : grid.initial_nodes()) {
    double u;
    field.eval(bn.z, u, gbuf);
    const double wv = bn.w * sgn(u - u0(bn.z));
    if (wv != 0.0) terms.push_back({bn.z, 0.0, wv});
  }
  for (const auto& bn : grid.lateral_nodes()) {
    double u;
    field.eval(bn.z, u, gbuf);
    const double gv = g ? (*g)(bn.z) : 0.0;
    const double wv = bn.w * sgn(u - gv);
    if (wv != 0.0) terms.push_back({bn.z, 0.0, wv});
  }
  return terms;
}

}  // namespace entnet
