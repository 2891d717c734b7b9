#include "hjlab/parallel.hpp"

#include <algorithm>
#include <atomic>

namespace hjlab {

namespace {
std::atomic<int> g_threads{1};
thread_local int t_limit = 0;
}  // namespace

void set_thread_count(int n) { g_threads.store(std::max(1, n)); }
int thread_count() {
  const int g = g_threads.load();
  return t_limit > 0 ? std::min(g, t_limit) : g;
}

ThreadLimit::ThreadLimit(int n) : previous_(t_limit) { t_limit = std::max(1, n); }
ThreadLimit::~ThreadLimit() { t_limit = previous_; }

}  // namespace hjlab
