#include "stkde/parallel.hpp"

#include <exception>
#include <thread>
#include <vector>

namespace stkde {

int effective_threads(int requested) {
  if (requested > 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t, std::size_t)>& body) {
  if (n == 0) return;
  std::size_t nt = static_cast<std::size_t>(effective_threads(threads));
  if (nt > n) nt = n;
  if (nt <= 1) {
    body(0, n);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errs(nt);
  pool.reserve(nt);
  for (std::size_t t = 0; t < nt; ++t) {
    std::size_t b = n * t / nt;
    std::size_t e = n * (t + 1) / nt;
    pool.emplace_back([&, t, b, e] {
      try {
        body(b, e);
      } catch (...) {
        errs[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& ep : errs) {
    if (ep) std::rethrow_exception(ep);
  }
}

}  // namespace stkde
