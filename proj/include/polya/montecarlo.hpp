#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "polya/dynamics.hpp"

namespace polya {

/// Worker count: $POLYA_WORKERS when set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
inline unsigned default_workers() {
    if (const char* env = std::getenv("POLYA_WORKERS")) {
        try {
            const long v = std::stol(env);
            if (v > 0) return static_cast<unsigned>(v);
        } catch (const std::exception&) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs `runs` independent simulations; run r uses derive_seed(base_seed, r)
/// and lands in slot r, so the result does not depend on scheduling.
inline std::vector<Trajectory> simulate_batch(const Graph& g, const BiasProfile& bias,
                                              const InitialConditions& init, std::uint64_t steps,
                                              std::uint64_t base_seed, std::uint64_t stride,
                                              std::size_t runs, unsigned workers = default_workers()) {
    std::vector<Trajectory> out(runs);
    if (runs == 0) return out;
    g.walk();  // surface a zero-degree error before spawning threads

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    const auto work = [&] {
        for (std::size_t r = next++; r < runs; r = next++) {
            try {
                out[r] = simulate(g, bias, init, steps, derive_seed(base_seed, r), stride);
            } catch (...) {
                const std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };

    const unsigned count = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(runs)));
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < count; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    return out;
}

}  // namespace polya
