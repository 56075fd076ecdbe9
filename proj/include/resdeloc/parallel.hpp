#pragma once

#include <cstddef>
#include <exception>
#include <vector>

#include <omp.h>

namespace resdeloc {

enum class Execution { serial, parallel };

/// How a kernel runs its independent work items. Results never depend on
/// the worker count: every item writes its own slot and reductions happen
/// afterwards in index order.
struct Exec {
  Execution mode = Execution::serial;
  int workers = 1;

  static Exec serial() { return {}; }
  static Exec with_workers(int k) {
    return k <= 1 ? Exec{} : Exec{Execution::parallel, k};
  }
};

/// Calls f(i) for i in [0, n). In parallel mode the first exception by
/// index is rethrown after the loop.
template <class F>
void for_each_index(std::size_t n, const Exec& exec, F&& f) {
  if (exec.mode == Execution::serial || exec.workers <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  const long long count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(exec.workers)
  for (long long i = 0; i < count; ++i) {
    try {
      f(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

/// Maps items to per-index results, then folds them serially in order.
template <class T, class F>
std::vector<T> map_indexed(std::size_t n, const Exec& exec, F&& f) {
  std::vector<T> out(n);
  for_each_index(n, exec, [&](std::size_t i) { out[i] = f(i); });
  return out;
}

}  // namespace resdeloc
