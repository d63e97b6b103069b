#include "dynact/parallel.hpp"

#include <tbb/blocked_range.h>
#include <tbb/global_control.h>
#include <tbb/parallel_for.h>
#include <tbb/partitioner.h>
#include <tbb/task_arena.h>

#include <algorithm>
#include <cstdlib>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

namespace dynact {
namespace {

std::size_t env_threads() {
  if (const char* env = std::getenv("DYNACT_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (...) {
    }
  }
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

struct ArenaState {
  std::mutex mutex;
  std::size_t threads = 0;
  std::unique_ptr<tbb::global_control> limit;  // lifts TBB's hardware-concurrency cap
  std::unique_ptr<tbb::task_arena> arena;
};

ArenaState& state() {
  static ArenaState s;
  return s;
}

tbb::task_arena& arena() {
  auto& s = state();
  std::lock_guard lock(s.mutex);
  if (!s.arena) {
    if (s.threads == 0) s.threads = env_threads();
    s.limit = std::make_unique<tbb::global_control>(tbb::global_control::max_allowed_parallelism,
                                                    s.threads);
    s.arena = std::make_unique<tbb::task_arena>(static_cast<int>(s.threads));
  }
  return *s.arena;
}

}  // namespace

std::size_t max_threads() {
  auto& s = state();
  std::lock_guard lock(s.mutex);
  if (s.threads == 0) s.threads = env_threads();
  return s.threads;
}

void set_max_threads(std::size_t n) {
  auto& s = state();
  std::lock_guard lock(s.mutex);
  s.threads = std::max<std::size_t>(1, n);
  s.arena.reset();
  s.limit.reset();
}

void parallel_for_range(std::size_t begin, std::size_t end,
                        const std::function<void(std::size_t, std::size_t)>& body) {
  if (end <= begin) return;
  if (max_threads() == 1 || end - begin < 64) {
    body(begin, end);
    return;
  }
  arena().execute([&] {
    tbb::parallel_for(
        tbb::blocked_range<std::size_t>(begin, end),
        [&](const tbb::blocked_range<std::size_t>& r) { body(r.begin(), r.end()); },
        tbb::static_partitioner());
  });
}

void parallel_for(std::size_t begin, std::size_t end, const std::function<void(std::size_t)>& body) {
  parallel_for_range(begin, end, [&](std::size_t first, std::size_t last) {
    for (std::size_t i = first; i < last; ++i) body(i);
  });
}

}  // namespace dynact
