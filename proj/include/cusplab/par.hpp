#pragma once
// Parallel execution helpers.
//
// Every kernel in this library has a serial reference path and (when OpenMP
// is available) a parallel path.  Reductions are *blocked*: both paths
// compute the same fixed-size per-block partial results and combine them
// serially left-to-right, so parallel and serial results are bitwise
// identical regardless of thread count.

#include <cstddef>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cusplab::par {

// Fixed block size for blocked reductions.  Must never depend on thread
// count, or bitwise reproducibility across machines is lost.
inline constexpr std::ptrdiff_t kBlock = 4096;

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

// Elementwise parallel loop: body(i) for i in [0, n).  Iterations must be
// independent.
template <class Body>
void parallel_for(std::ptrdiff_t n, Body&& body) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) body(i);
#else
  for (std::ptrdiff_t i = 0; i < n; ++i) body(i);
#endif
}

// Serial reference loop with the same signature.
template <class Body>
void serial_for(std::ptrdiff_t n, Body&& body) {
  for (std::ptrdiff_t i = 0; i < n; ++i) body(i);
}

// Blocked reduction.  block_op(lo, hi) -> T computes the partial result of
// one block [lo, hi); comb(acc, partial) -> T folds partials left-to-right.
// The block decomposition is identical in both paths, so the result is
// bitwise independent of `parallel` and of the thread count.
template <class T, class BlockOp, class Combine>
T blocked_reduce(std::ptrdiff_t n, T init, BlockOp&& block_op, Combine&& comb,
                 bool parallel = true) {
  if (n <= 0) return init;
  const std::ptrdiff_t nblocks = (n + kBlock - 1) / kBlock;
  std::vector<T> partials(static_cast<std::size_t>(nblocks));
  auto fill = [&](std::ptrdiff_t b) {
    const std::ptrdiff_t lo = b * kBlock;
    const std::ptrdiff_t hi = lo + kBlock < n ? lo + kBlock : n;
    partials[static_cast<std::size_t>(b)] = block_op(lo, hi);
  };
  if (parallel) {
    parallel_for(nblocks, fill);
  } else {
    serial_for(nblocks, fill);
  }
  T acc = init;
  for (std::ptrdiff_t b = 0; b < nblocks; ++b)
    acc = comb(acc, partials[static_cast<std::size_t>(b)]);
  return acc;
}

}  // namespace cusplab::par
