#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "entnet/loss.hpp"
#include "entnet/metrics.hpp"
#include "entnet/network.hpp"
#include "entnet/problems.hpp"

namespace entnet {

struct TrainConfig {
  std::string benchmark = "standing_shock";
  std::vector<int> widths;  // full stack [d+1, hidden..., 1]
  int n_strips = 1;         // N_T time strips
  std::vector<int> n_cells_x = {128};
  int n_cells_t = 64;  // total over [0, T]; split evenly across strips
  long n_train = 10000;
  int n_pert = 512;
  double pert_b = 5.0;
  double lr = 1e-3;
  std::uint64_t init_seed = 1, pert_seed = 1;
  double clip_c = 0.0;  // 0 selects 2 (||u0||_inf + 1)
  bool augment_constants = true;
  bool shared_across_cells = false;
  int oversample = 1;
  bool compute_metrics = true;
  int metrics_refine = 4;  // evaluation grid refinement per axis
  RefCfg reference;        // WENO settings when no closed form exists
};

struct IterRecord {
  long iteration;
  LossBreakdown loss;
};

struct StripResult {
  ClippedTanhNet best_net;
  long best_iteration = 0;
  LossBreakdown best_loss;
  std::vector<IterRecord> history;
  double t_lo = 0.0, t_hi = 0.0;
};

struct TrainResult {
  std::vector<StripResult> strips;
  double clip_c = 0.0;
  double wall_seconds = 0.0;
  std::optional<ErrorReport> metrics;
};

// Aborts on a non-finite loss; the message carries the offending iteration's
// breakdown.
class TrainDivergence : public std::runtime_error {
 public:
  TrainDivergence(const std::string& msg, long iteration)
      : std::runtime_error(msg), iteration(iteration) {}
  long iteration;
};

// One time slab of Algorithm 1: per iteration, sample candidates, select k*,
// assemble the loss, take an Adam step; the best snapshot is tracked over the
// final 10% of iterations (loss compared before the update so the stored
// value reproduces exactly on re-evaluation).
StripResult train_strip(const TrainConfig& cfg, const BenchmarkProblem& problem,
                        int strip_index, const SpaceTimeFn& initial_data);

// Strip-by-strip training over N_T equal slabs; strip k > 0 takes its initial
// data from the previous strip's best network at the slab interface.
TrainResult train(const TrainConfig& cfg);

// Stitches per-strip networks by membership of t; interface times evaluate
// the later strip.
class StitchedField : public Field {
 public:
  explicit StitchedField(const TrainResult& result) : result_(result) {}
  void eval(const Pt& z, double& value, double* grad) const override;
  const ClippedTanhNet& net_at(double t) const;

 private:
  const TrainResult& result_;
};

// Error metrics of a stitched result against the benchmark reference.
ErrorReport evaluate_result(const TrainResult& result, const TrainConfig& cfg,
                            const BenchmarkProblem& problem);

}  // namespace entnet
