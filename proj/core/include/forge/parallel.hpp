#pragma once

namespace forge {

/**
 * Global budget for internally parallel stages (currently the per-line
 * scan of is_sudoku_solution).  The default is 1, so every operation is
 * serial unless a caller raises the budget; results are identical at
 * every budget.
 */
int thread_budget();

/** Sets the budget; values below 1 are clamped to 1. */
void set_thread_budget(int threads);

}  // namespace forge
