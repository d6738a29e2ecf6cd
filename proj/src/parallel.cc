#include "radars/parallel.h"

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace radars {

int MaxThreads() {
  if (const char* env = std::getenv("RADARS_THREADS")) {
    try {
      int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void ParallelFor(std::size_t n, std::size_t cost_per_item,
                 const std::function<void(std::size_t, std::size_t)>& fn) {
  constexpr std::size_t kMinWorkPerThread = 1 << 16;
  const std::size_t threads =
      std::min<std::size_t>({static_cast<std::size_t>(MaxThreads()), n,
                             std::max<std::size_t>(1, n * cost_per_item / kMinWorkPerThread)});
  if (threads <= 1) {
    fn(0, n);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (n + threads - 1) / threads;
  for (std::size_t begin = chunk; begin < n; begin += chunk) {
    pool.emplace_back(fn, begin, std::min(n, begin + chunk));
  }
  fn(0, std::min(n, chunk));
  for (auto& t : pool) t.join();
}

}  // namespace radars
