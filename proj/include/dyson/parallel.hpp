#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace dyson {

inline int resolve_workers(int requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

/// out[i] = f(i) for i in [0, count), spread over `workers` threads. Each index
/// is computed exactly once and independently, so the result does not depend
/// on the worker count.
template <typename T, typename F>
std::vector<T> parallel_map(std::size_t count, int workers, F&& f) {
  std::vector<T> out(count);
  const auto w = static_cast<std::size_t>(std::min<std::size_t>(resolve_workers(workers),
                                                                std::max<std::size_t>(count, 1)));
  if (w <= 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = f(i);
    return out;
  }
  std::vector<std::exception_ptr> errors(w);
  std::vector<std::thread> threads;
  threads.reserve(w);
  for (std::size_t id = 0; id < w; ++id) {
    threads.emplace_back([&, id] {
      try {
        for (std::size_t i = id; i < count; i += w) out[i] = f(i);
      } catch (...) {
        errors[id] = std::current_exception();
      }
    });
  }
  for (auto& th : threads) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace dyson
