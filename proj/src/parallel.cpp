#include "entnet/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>

namespace entnet {

int hardware_threads() {
  unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

ThreadPool::ThreadPool() {
  threads_ = hardware_threads();
  if (const char* env = std::getenv("ENTROPY_NET_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) threads_ = n;
  }
}

ThreadPool& ThreadPool::global() {
  static ThreadPool pool;
  return pool;
}

void ThreadPool::set_threads(int n) {
  if (n >= 1) threads_ = n;
}

void ThreadPool::run_blocks(int n_blocks, const std::function<void(int)>& fn) {
  if (n_blocks <= 0) return;
  int workers = std::min(threads_, n_blocks);
  if (workers <= 1) {
    for (int b = 0; b < n_blocks; ++b) fn(b);
    return;
  }
  std::atomic<int> next{0};
  auto drain = [&] {
    for (;;) {
      int b = next.fetch_add(1);
      if (b >= n_blocks) break;
      fn(b);
    }
  };
  std::vector<std::thread> ts;
  ts.reserve(workers - 1);
  for (int i = 0; i < workers - 1; ++i) ts.emplace_back(drain);
  drain();
  for (auto& t : ts) t.join();
}

double block_sum(std::span<const double> values) {
  const std::size_t n = values.size();
  double total = 0.0;
  for (std::size_t b0 = 0; b0 < n; b0 += kReduceBlock) {
    const std::size_t b1 = std::min(n, b0 + kReduceBlock);
    double partial = 0.0;
    for (std::size_t i = b0; i < b1; ++i) partial += values[i];
    total += partial;
  }
  return total;
}

}  // namespace entnet
