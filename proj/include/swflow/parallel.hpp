#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace swflow {

/// Number of worker threads used by site sweeps. Defaults to 1.
int thread_count();
void set_thread_count(int threads);

/// Runs body(begin, end) over disjoint contiguous chunks of [0, count).
/// Every index is visited by exactly one chunk.
void parallel_chunks(std::size_t count,
                     const std::function<void(std::size_t, std::size_t)>& body);

template <class F>
void parallel_for(std::size_t count, F&& body) {
  parallel_chunks(count, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) body(i);
  });
}

/// Block size of the fixed-shape reduction.
inline constexpr std::size_t kReductionBlock = 1024;

/// Pairwise sum of per-block partial sums. The result depends only on the
/// values, never on how blocks were distributed over threads.
double tree_sum(std::vector<double> partials);

/// Sum of term(i) for i in [0, count), evaluated in fixed blocks of
/// kReductionBlock and combined with tree_sum.
template <class F>
double deterministic_sum(std::size_t count, F&& term) {
  const std::size_t blocks = (count + kReductionBlock - 1) / kReductionBlock;
  std::vector<double> partials(blocks, 0.0);
  parallel_for(blocks, [&](std::size_t b) {
    const std::size_t begin = b * kReductionBlock;
    const std::size_t end = begin + kReductionBlock < count ? begin + kReductionBlock : count;
    double s = 0.0;
    for (std::size_t i = begin; i < end; ++i) s += term(i);
    partials[b] = s;
  });
  return tree_sum(std::move(partials));
}

}  // namespace swflow
