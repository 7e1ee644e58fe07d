#include "imhotep/render/parallel.hpp"

#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace imhotep {

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_rows(int rows, int workers, const std::function<void(int, int)>& fn) {
  const int bands = std::clamp(resolve_workers(workers), 1, std::max(rows, 1));
  if (bands == 1) {
    fn(0, rows);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> threads;
    threads.reserve(static_cast<std::size_t>(bands));
    for (int b = 0; b < bands; ++b) {
      const int y0 = static_cast<int>(static_cast<long>(rows) * b / bands);
      const int y1 = static_cast<int>(static_cast<long>(rows) * (b + 1) / bands);
      threads.emplace_back([&, y0, y1] {
        try {
          fn(y0, y1);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace imhotep
