#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace stokes_lattice {

// STOKES_LATTICE_THREADS caps worker count; 0 or unset means hardware concurrency
inline unsigned threads_from_env() {
    const char* s = std::getenv("STOKES_LATTICE_THREADS");
    if (!s || !*s) return 0;
    try {
        long v = std::stol(s);
        return v > 0 ? unsigned(v) : 0u;
    } catch (...) {
        return 0;
    }
}

inline unsigned resolve_threads(unsigned requested) {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    return requested == 0 ? hw : requested;
}

// fn(i) for i in [0, n); static block partition
template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
    unsigned t = std::min<std::size_t>(resolve_threads(threads), std::max<std::size_t>(n, 1));
    if (t <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errs(t);
    for (unsigned w = 0; w < t; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w * n / t; i < (w + 1) * n / t; ++i) fn(i);
            } catch (...) {
                errs[w] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
}

}  // namespace stokes_lattice
