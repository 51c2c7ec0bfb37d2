#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace entnet {

// Worker pool with deterministic work decomposition: callers split index
// ranges into fixed-size blocks (independent of the thread count), compute a
// partial result per block, and fold the partials in block order. Results are
// therefore bitwise identical for any --threads setting.
class ThreadPool {
 public:
  static ThreadPool& global();

  void set_threads(int n);
  int threads() const { return threads_; }

  // Runs fn(block) for block = 0..n_blocks-1. Blocks may execute on any
  // worker; fn must write only block-local state.
  void run_blocks(int n_blocks, const std::function<void(int)>& fn);

 private:
  ThreadPool();
  int threads_ = 1;
};

inline constexpr std::size_t kReduceBlock = 4096;

// Fixed-block-folded sum; single- and multi-threaded runs use the same
// reduction tree.
double block_sum(std::span<const double> values);

// Sum of fn(i) for i in [0, n), folded over kReduceBlock-sized blocks.
template <class Fn>
inline double block_sum_indexed(std::size_t n, Fn&& fn) {
  double total = 0.0;
  for (std::size_t b0 = 0; b0 < n; b0 += kReduceBlock) {
    const std::size_t b1 = std::min(n, b0 + kReduceBlock);
    double partial = 0.0;
    for (std::size_t i = b0; i < b1; ++i) partial += fn(i);
    total += partial;
  }
  return total;
}

int hardware_threads();

}  // namespace entnet
