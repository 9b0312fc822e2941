#include "forge/parallel.hpp"

#include <atomic>

namespace forge {

namespace {
std::atomic<int> g_thread_budget{1};
}  // namespace

int thread_budget() { return g_thread_budget.load(std::memory_order_relaxed); }

void set_thread_budget(int threads) {
  g_thread_budget.store(threads < 1 ? 1 : threads,
                        std::memory_order_relaxed);
}

}  // namespace forge
