#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <optional>
#include <thread>
#include <vector>

namespace lpmrl::harness {

/// Runs job(i) for i in [0, n) on up to `threads` workers (0 = hardware concurrency).
/// Results come back in index order; the lowest-index exception is rethrown.
template <class Result>
std::vector<Result> run_indexed(std::size_t n, std::size_t threads, const std::function<Result(std::size_t)>& job) {
  std::vector<std::optional<Result>> slots(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        slots[i].emplace(job(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::size_t count = threads == 0 ? std::max<std::size_t>(1, std::thread::hardware_concurrency()) : threads;
  count = std::min(count, std::max<std::size_t>(n, 1));
  if (count <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < count; ++t) pool.emplace_back(worker);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<Result> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace lpmrl::harness
