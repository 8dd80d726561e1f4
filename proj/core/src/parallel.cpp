#include "twrn/parallel.hpp"

#include <algorithm>
#include <atomic>

namespace twrn {

namespace {
std::atomic<int> g_max_jobs{0};
}

void set_max_jobs(int jobs) { g_max_jobs.store(jobs < 0 ? 0 : jobs); }

int max_jobs() {
  int j = g_max_jobs.load();
  if (j > 0) return j;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_chunks(std::size_t n, std::size_t n_chunks,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& body) {
  if (n == 0) return;
  n_chunks = std::min(n_chunks, n);
  if (n_chunks == 0) n_chunks = 1;
  std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(max_jobs()), n_chunks);

  if (workers <= 1) {
    for (std::size_t c = 0; c < n_chunks; ++c) {
      std::size_t b = c * n / n_chunks;
      std::size_t e = (c + 1) * n / n_chunks;
      body(c, b, e);
    }
    return;
  }

  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      while (true) {
        std::size_t c = next.fetch_add(1);
        if (c >= n_chunks) break;
        std::size_t b = c * n / n_chunks;
        std::size_t e = (c + 1) * n / n_chunks;
        body(c, b, e);
      }
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace twrn
