#include "clcons/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace clcons {

namespace {

std::atomic<int> g_jobs{0};
thread_local bool tls_in_worker = false;

int initial_jobs() {
  if (const char* env = std::getenv("CLCONS_JOBS")) {
    const int j = std::atoi(env);
    if (j >= 1) return j;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

}  // namespace

int default_jobs() {
  int j = g_jobs.load(std::memory_order_relaxed);
  if (j == 0) {
    j = initial_jobs();
    g_jobs.store(j, std::memory_order_relaxed);
  }
  return j;
}

void set_default_jobs(int jobs) { g_jobs.store(std::max(1, jobs), std::memory_order_relaxed); }

void parallel_for(std::int64_t n, const std::function<void(std::int64_t, std::int64_t)>& fn,
                  int jobs) {
  if (n <= 0) return;
  if (jobs <= 0) jobs = default_jobs();
  jobs = static_cast<int>(std::min<std::int64_t>(jobs, n));
  if (jobs <= 1 || tls_in_worker) {
    fn(0, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  const std::int64_t chunk = (n + jobs - 1) / jobs;
  for (int t = 0; t < jobs; ++t) {
    const std::int64_t begin = t * chunk;
    const std::int64_t end = std::min<std::int64_t>(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&fn, begin, end] {
      tls_in_worker = true;
      fn(begin, end);
      tls_in_worker = false;
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace clcons
