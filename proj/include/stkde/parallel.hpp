#pragma once

#include <cstddef>
#include <functional>

namespace stkde {

// Runs body(begin, end) over a static partition of [0, n) into contiguous
// chunks, one per worker. Results must not depend on the chunking, so the
// thread count never changes output. threads == 0 picks the hardware count.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t, std::size_t)>& body);

int effective_threads(int requested);

}  // namespace stkde
