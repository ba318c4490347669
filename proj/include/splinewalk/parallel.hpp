#pragma once

#include <vector>

#include <omp.h>

namespace splinewalk {

// Deterministic blocked parallel loop over [0, items). Work is split into
// fixed-size blocks; each block fills its own Partial, and partials are
// merged serially in block order afterwards. The result is therefore
// identical for any thread count, including 1 (the serial reference path
// is literally this loop with one thread).
//
// Partial must be default-constructible and expose merge(const Partial&).
template <typename Partial, typename Body>
Partial run_blocked(long long items, long long block_size, Body&& body) {
  if (block_size < 1) block_size = 1;
  const long long nblocks = (items + block_size - 1) / block_size;
  std::vector<Partial> partials(static_cast<std::size_t>(nblocks));

#pragma omp parallel for schedule(dynamic)
  for (long long b = 0; b < nblocks; ++b) {
    const long long lo = b * block_size;
    const long long hi = std::min(items, lo + block_size);
    body(lo, hi, partials[static_cast<std::size_t>(b)]);
  }

  Partial out;
  for (const auto& p : partials) out.merge(p);
  return out;
}

// Default block size used by the experiment recipes. Must not depend on the
// thread count, or determinism across thread counts breaks.
inline long long default_block(long long items) {
  const long long b = items / 256;
  return b < 16 ? 16 : b;
}

}  // namespace splinewalk
