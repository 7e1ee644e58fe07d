#pragma once

#include <functional>

namespace imhotep {

/// 0 means "use the hardware concurrency".
int resolve_workers(int requested);

/// Splits [0, rows) into `workers` contiguous bands and runs `fn(y0, y1)` for
/// each band on its own thread. Every row belongs to exactly one band, so
/// per-pixel work yields the same bytes for any worker count.
void parallel_rows(int rows, int workers, const std::function<void(int, int)>& fn);

}  // namespace imhotep
