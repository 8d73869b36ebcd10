#pragma once

#include <cstddef>
#include <functional>

namespace mpp {

/// Worker count: `requested` when positive, else the MPP_THREADS environment
/// variable, else std::thread::hardware_concurrency().
unsigned resolve_thread_count(int requested = 0);

/// Runs body(i) for i in [0, count) on up to `threads` workers. Exceptions
/// are collected and the one with the lowest index is rethrown after all
/// workers finish, so failures are reported deterministically.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace mpp
