#pragma once

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace cpe {

// Worker count comes from CPE_THREADS (default 1).  Read on every call so
// tests can flip it between runs within one process.
inline int thread_count() {
  if (const char* s = std::getenv("CPE_THREADS")) {
    const int v = std::atoi(s);
    if (v >= 1) return v;
  }
  return 1;
}

// Static partition of [0, n).  Only loops whose iterations write disjoint
// data go through here; every reduction in the code base stays serial, so
// results are bitwise independent of the worker count.
template <class F>
void parallel_for(int n, F&& body) {
  const int nt = std::min(thread_count(), n);
  if (nt <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(nt);
  for (int t = 0; t < nt; ++t) {
    const int lo = static_cast<int>(static_cast<long long>(n) * t / nt);
    const int hi = static_cast<int>(static_cast<long long>(n) * (t + 1) / nt);
    pool.emplace_back([lo, hi, &body] {
      for (int i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace cpe
