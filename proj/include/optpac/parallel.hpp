#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace optpac {

/// Workers used for `tasks` independent tasks; jobs == 0 means hardware concurrency.
inline std::size_t worker_count(std::size_t jobs, std::size_t tasks) {
  const std::size_t n = jobs == 0 ? std::max(1u, std::thread::hardware_concurrency()) : jobs;
  return std::max<std::size_t>(1, std::min(n, tasks));
}

/// Runs fn(0..tasks-1) on a small pool. Each task must write only its own
/// output slot; the first exception is rethrown after all workers stop.
template <class Fn>
void parallel_for(std::size_t tasks, std::size_t jobs, Fn&& fn) {
  const std::size_t workers = worker_count(jobs, tasks);
  if (workers <= 1) {
    for (std::size_t i = 0; i < tasks; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < tasks; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          next = tasks;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace optpac
