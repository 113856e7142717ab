#pragma once

#include <cstdint>
#include <functional>

namespace cavdet {

enum class ExecPolicy { serial, openmp };

// Runs fn(i) for i in [0, n). Iterations must be independent; results are
// bitwise identical across policies because no cross-iteration reduction
// happens here.
void parallel_for(std::int64_t n, ExecPolicy policy, const std::function<void(std::int64_t)>& fn);

bool openmp_enabled();
int worker_count();

}  // namespace cavdet
