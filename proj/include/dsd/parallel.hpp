#pragma once

#include <cstddef>
#include <cstdint>
#include <type_traits>
#include <vector>

namespace dsd {

enum class Execution { kSerial, kParallel };

/// Reference loop: results[i] = fn(i) in index order.
template <class Fn>
auto map_trials_serial(std::size_t count, Fn&& fn) {
  using Result = std::invoke_result_t<Fn&, std::size_t>;
  std::vector<Result> results(count);
  for (std::size_t i = 0; i < count; ++i) results[i] = fn(i);
  return results;
}

/// OpenMP version of map_trials_serial. Every trial draws from its own
/// stream, so the output is identical to the serial loop for any thread count.
template <class Fn>
auto map_trials_parallel(std::size_t count, Fn&& fn) {
  using Result = std::invoke_result_t<Fn&, std::size_t>;
  std::vector<Result> results(count);
  const auto n = static_cast<std::int64_t>(count);
#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t i = 0; i < n; ++i) {
    results[static_cast<std::size_t>(i)] = fn(static_cast<std::size_t>(i));
  }
  return results;
}

template <class Fn>
auto map_trials(std::size_t count, Fn&& fn, Execution exec) {
  return exec == Execution::kParallel ? map_trials_parallel(count, fn)
                                      : map_trials_serial(count, fn);
}

/// Worker threads OpenMP would use; 1 when built without it.
int hardware_threads();

}  // namespace dsd
