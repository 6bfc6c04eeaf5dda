#pragma once

#include <functional>

namespace dlgain {

// Runs body(i) for i in [0, n) on up to `threads` workers pulling indices
// from a shared counter. Results must be written to per-index slots so the
// outcome does not depend on scheduling. The first exception is rethrown
// after all workers stop.
void parallel_for(int n, int threads, const std::function<void(int)>& body);

}  // namespace dlgain
