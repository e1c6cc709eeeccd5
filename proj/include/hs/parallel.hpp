#pragma once

#include <cstddef>
#include <exception>
#include <type_traits>
#include <vector>

namespace hs {

enum class Exec { Serial, OpenMP };

// Thread count for OpenMP kernels, capped by HS_NUM_THREADS when set.
int max_threads();

namespace detail {
void run_indexed(Exec exec, std::size_t n, void (*body)(void*, std::size_t), void* ctx);
}

// Evaluates f(i) for i in [0, n) and returns the results in index order.
// The first exception thrown by any index is rethrown after the loop.
template <class F>
auto parallel_map(Exec exec, std::size_t n, F&& f) -> std::vector<std::invoke_result_t<F&, std::size_t>> {
    using R = std::invoke_result_t<F&, std::size_t>;
    std::vector<R> out(n);
    std::vector<std::exception_ptr> errs(n);
    struct Ctx {
        std::remove_reference_t<F>* f;
        std::vector<R>* out;
        std::vector<std::exception_ptr>* errs;
    } ctx{&f, &out, &errs};
    detail::run_indexed(
        exec, n,
        [](void* p, std::size_t i) {
            auto* c = static_cast<Ctx*>(p);
            try {
                (*c->out)[i] = (*c->f)(i);
            } catch (...) {
                (*c->errs)[i] = std::current_exception();
            }
        },
        &ctx);
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
    return out;
}

}  // namespace hs
