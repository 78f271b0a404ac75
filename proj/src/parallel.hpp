#pragma once

#include <cstddef>
#include <exception>

#include "uner/execution.hpp"

namespace uner::detail {

// Runs fn(i) for i in [0, n). The parallel branch spreads indices over an
// OpenMP team; the first exception thrown by any iteration is rethrown after
// the loop joins (exceptions must not escape an OpenMP region).
template <typename Fn>
void for_each_index(std::size_t n, Execution exec, Fn&& fn) {
  if (exec == Execution::serial) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr failure;
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 32)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(uner_parallel_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace uner::detail
