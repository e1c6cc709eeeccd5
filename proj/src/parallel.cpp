#include "hs/parallel.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>

namespace hs {

int max_threads() {
    int n = omp_get_max_threads();
    if (const char* env = std::getenv("HS_NUM_THREADS")) {
        try {
            const int cap = std::stoi(env);
            if (cap > 0 && cap < n) n = cap;
        } catch (...) {
        }
    }
    return n;
}

namespace detail {

void run_indexed(Exec exec, std::size_t n, void (*body)(void*, std::size_t), void* ctx) {
    if (exec == Exec::Serial || n < 2) {
        for (std::size_t i = 0; i < n; ++i) body(ctx, i);
        return;
    }
    const long long count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(max_threads())
    for (long long i = 0; i < count; ++i) body(ctx, static_cast<std::size_t>(i));
}

}  // namespace detail
}  // namespace hs
