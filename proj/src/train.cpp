#include "entnet/train.hpp"

#include <chrono>
#include <cmath>
#include <memory>
#include <sstream>

#include "entnet/rng.hpp"

namespace entnet {
namespace {

std::string breakdown_str(const LossBreakdown& b) {
  std::ostringstream os;
  os << "total=" << b.total << " j_ent*=" << b.j_ent_star << " l_reg=" << b.l_reg
     << " l_ibc=(" << b.l_ibc_initial << ", " << b.l_ibc_boundary << ")"
     << " argmax=" << b.argmax_index;
  return os.str();
}

}  // namespace

StripResult train_strip(const TrainConfig& cfg, const BenchmarkProblem& problem,
                        int strip_index, const SpaceTimeFn& initial_data) {
  if (cfg.n_train < 1) throw std::invalid_argument("train: n_train must be >= 1");
  if (cfg.n_strips < 1 || strip_index < 0 || strip_index >= cfg.n_strips)
    throw std::invalid_argument("train: bad strip index");
  if (cfg.n_cells_t % cfg.n_strips != 0)
    throw std::invalid_argument("train: n_cells_t must be divisible by n_strips");

  const double slab = problem.t_final / cfg.n_strips;
  const double t_lo = slab * strip_index;
  const double t_hi = strip_index + 1 == cfg.n_strips ? problem.t_final
                                                      : slab * (strip_index + 1);
  auto grid = std::make_shared<const QuadGrid>(problem.lo, problem.hi, t_hi,
                                               cfg.n_cells_x,
                                               cfg.n_cells_t / cfg.n_strips,
                                               cfg.oversample, t_lo);

  const double c = cfg.clip_c > 0.0 ? cfg.clip_c : problem.default_clip();
  std::vector<int> widths = cfg.widths;
  if (widths.empty()) widths = {problem.dim() + 1, 64, 64, 64, 64, 1};
  if (widths.front() != problem.dim() + 1)
    throw std::invalid_argument("train: net input width must equal d+1");

  ClippedTanhNet net = init_network(
      widths, c, rng::key({cfg.init_seed, static_cast<std::uint64_t>(strip_index)}));
  AdamState adam(net.param_count(), cfg.lr);

  PertConfig pert;
  pert.b = cfg.pert_b;
  pert.n_pert = cfg.n_pert;
  pert.augment_constants = cfg.augment_constants;
  pert.shared_across_cells = cfg.shared_across_cells;
  pert.seed = rng::key({cfg.pert_seed, static_cast<std::uint64_t>(strip_index)});
  pert.clip_c = c;

  StripResult out{zero_network(widths, c), 0, {}, {}, t_lo, t_hi};
  out.history.reserve(cfg.n_train);
  bool have_best = false;

  for (long i = 1; i <= cfg.n_train; ++i) {
    NetField field(net);
    NodalField nf;
    std::unique_ptr<DpwpFunction> k_star;
    const LossBreakdown b =
        total_loss_with_argmax(field, problem.flux, initial_data,
                               &problem.boundary_trace, pert, grid,
                               static_cast<std::uint64_t>(i), nf, k_star);
    if (!std::isfinite(b.total))
      throw TrainDivergence("train: non-finite loss at iteration " + std::to_string(i) +
                                " (" + breakdown_str(b) + ")",
                            i);
    out.history.push_back({i, b});
    if (10 * i > 9 * cfg.n_train && (!have_best || b.total < out.best_loss.total)) {
      out.best_net = net;
      out.best_iteration = i;
      out.best_loss = b;
      have_best = true;
    }
    const std::vector<NodeTerm> terms = loss_node_terms(
        nf, *grid, *k_star, field, initial_data, &problem.boundary_trace, grid->h());
    const ParamGrad grad = grad_loss_params(net, problem.flux, terms);
    adam_step(adam, net, grad);
  }
  return out;
}

TrainResult train(const TrainConfig& cfg) {
  const auto t_start = std::chrono::steady_clock::now();
  const BenchmarkProblem problem = make_problem(cfg.benchmark);
  TrainResult result;
  result.clip_c = cfg.clip_c > 0.0 ? cfg.clip_c : problem.default_clip();

  SpaceTimeFn initial = problem.u0;
  for (int k = 0; k < cfg.n_strips; ++k) {
    StripResult strip = train_strip(cfg, problem, k, initial);
    result.strips.push_back(std::move(strip));
    const ClippedTanhNet& best = result.strips.back().best_net;
    initial = [&best](const Pt& z) { return best.forward(z); };
  }
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  if (cfg.compute_metrics) result.metrics = evaluate_result(result, cfg, problem);
  return result;
}

const ClippedTanhNet& StitchedField::net_at(double t) const {
  const auto& strips = result_.strips;
  for (std::size_t k = strips.size(); k-- > 1;)
    if (t >= strips[k].t_lo) return strips[k].best_net;
  return strips.front().best_net;
}

void StitchedField::eval(const Pt& z, double& value, double* grad) const {
  const int t_axis = result_.strips.front().best_net.input_dim() - 1;
  const ClippedTanhNet& net = net_at(z[t_axis]);
  const auto e = net.forward_with_input_grad(z);
  value = e.value;
  for (int a = 0; a < net.input_dim(); ++a) grad[a] = e.grad[a];
}

ErrorReport evaluate_result(const TrainResult& result, const TrainConfig& cfg,
                            const BenchmarkProblem& problem) {
  std::vector<int> nx = cfg.n_cells_x;
  for (int& n : nx) n *= cfg.metrics_refine;
  const QuadGrid eval_grid(problem.lo, problem.hi, problem.t_final, nx,
                           cfg.n_cells_t * cfg.metrics_refine);
  StitchedField field(result);
  if (problem.has_exact) return relative_errors(field, problem, eval_grid);
  const RefSolution ref =
      solve_reference_dense(problem, cfg.reference.n_cells, cfg.reference.cfl);
  return relative_errors(field, problem, eval_grid, &ref);
}

}  // namespace entnet
