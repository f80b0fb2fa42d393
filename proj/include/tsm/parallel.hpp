#pragma once

// Execution policy shared by every data-parallel kernel. The serial path is
// the reference implementation; the OpenMP path must produce bit-identical
// results because each index writes only its own output slot and all
// reductions happen afterwards in index order.

#include <cstddef>
#include <exception>
#include <limits>

namespace tsm {

enum class Execution { serial, parallel };

/// Worker count for parallel kernels: TSM_THREADS when set to a positive
/// integer, otherwise the OpenMP default.
int worker_count();

/// Runs body(i) for i in [0, n). In parallel mode the exception thrown by the
/// lowest failing index is rethrown after the loop.
template <class Body>
void for_each_index(std::size_t n, Execution exec, Body&& body) {
  if (exec == Execution::serial || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr error;
  std::size_t error_index = std::numeric_limits<std::size_t>::max();
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(worker_count())
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(tsm_for_each_error)
      {
        if (static_cast<std::size_t>(i) < error_index) {
          error_index = static_cast<std::size_t>(i);
          error = std::current_exception();
        }
      }
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace tsm
