#pragma once

#include <algorithm>
#include <cstddef>
#include <memory>
#include <numeric>
#include <vector>

#include <tbb/blocked_range.h>
#include <tbb/global_control.h>
#include <tbb/parallel_for.h>
#include <tbb/parallel_invoke.h>
#include <tbb/parallel_sort.h>
#include <tbb/task_arena.h>

namespace detpart {

// Owns the worker pool for one partitioning run. Library code never consults
// ambient parallelism; every parallel loop goes through an Executor handed in
// by the caller. All loops are index-parallel with disjoint writes or
// commutative integer updates, so results never depend on num_threads().
class Executor {
 public:
  explicit Executor(int num_threads = 1)
      : num_threads_(std::max(1, num_threads)) {
    if (num_threads_ > 1) {
      // TBB caps workers at the core count by default; lift the cap so the
      // requested thread count is honored even on small machines. All
      // executors use the same value because TBB applies the minimum.
      limit_ = std::make_unique<tbb::global_control>(tbb::global_control::max_allowed_parallelism,
                                                     kMaxParallelism);
      arena_ = std::make_unique<tbb::task_arena>(num_threads_);
    }
  }

  static constexpr std::size_t kMaxParallelism = 256;

  Executor(const Executor&) = delete;
  Executor& operator=(const Executor&) = delete;

  int num_threads() const { return num_threads_; }
  bool sequential() const { return num_threads_ == 1; }

  // body(i) for every i in [begin, end).
  template <typename Body>
  void parallel_for(std::size_t begin, std::size_t end, Body&& body) const {
    if (begin >= end) return;
    if (sequential() || end - begin < 2) {
      for (std::size_t i = begin; i < end; ++i) body(i);
      return;
    }
    arena_->execute([&] {
      tbb::parallel_for(tbb::blocked_range<std::size_t>(begin, end, 256),
                        [&](const tbb::blocked_range<std::size_t>& r) {
                          for (std::size_t i = r.begin(); i != r.end(); ++i) body(i);
                        });
    });
  }

  // Coarse-grained variant for loops whose iterations are large tasks.
  template <typename Body>
  void parallel_tasks(std::size_t count, Body&& body) const {
    if (count == 0) return;
    if (sequential() || count == 1) {
      for (std::size_t i = 0; i < count; ++i) body(i);
      return;
    }
    arena_->execute([&] {
      tbb::parallel_for(tbb::blocked_range<std::size_t>(0, count, 1),
                        [&](const tbb::blocked_range<std::size_t>& r) {
                          for (std::size_t i = r.begin(); i != r.end(); ++i) body(i);
                        });
    });
  }

  template <typename F, typename G>
  void invoke(F&& f, G&& g) const {
    if (sequential()) {
      f();
      g();
      return;
    }
    arena_->execute([&] { tbb::parallel_invoke(f, g); });
  }

  // cmp must be a strict total order on the values, otherwise the result
  // would depend on the thread count.
  template <typename It, typename Cmp>
  void sort(It first, It last, Cmp cmp) const {
    if (sequential() || last - first < 4096) {
      std::sort(first, last, cmp);
      return;
    }
    arena_->execute([&] { tbb::parallel_sort(first, last, cmp); });
  }

 private:
  int num_threads_;
  std::unique_ptr<tbb::global_control> limit_;
  std::unique_ptr<tbb::task_arena> arena_;
};

// Exclusive prefix sum; returns the total. Integer only.
template <typename T>
T exclusive_prefix_sum(std::vector<T>& values) {
  T running = 0;
  for (auto& v : values) {
    const T x = v;
    v = running;
    running += x;
  }
  return running;
}

}  // namespace detpart
