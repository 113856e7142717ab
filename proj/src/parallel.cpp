#include "cavdet/parallel.hpp"

#include <exception>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cavdet {

void parallel_for(std::int64_t n, ExecPolicy policy, const std::function<void(std::int64_t)>& fn) {
    if (policy == ExecPolicy::openmp) {
#ifdef _OPENMP
        // an exception escaping the parallel region would terminate the
        // process, so trap the first one and rethrow it afterwards
        std::exception_ptr first;
#pragma omp parallel for schedule(dynamic)
        for (std::int64_t i = 0; i < n; ++i) {
            try {
                fn(i);
            } catch (...) {
#pragma omp critical(cavdet_parallel_for_err)
                if (!first) first = std::current_exception();
            }
        }
        if (first) std::rethrow_exception(first);
        return;
#endif
    }
    for (std::int64_t i = 0; i < n; ++i) fn(i);
}

bool openmp_enabled() {
#ifdef _OPENMP
    return true;
#else
    return false;
#endif
}

int worker_count() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace cavdet
