#include "dfa/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>

namespace dfa {

namespace {

std::atomic<int> g_override{0};

int env_cap() {
  static int cap = [] {
    const char* s = std::getenv("DFA_THREADS");
    if (!s) return 0;
    try {
      int v = std::stoi(s);
      return v > 0 ? v : 0;
    } catch (...) {
      return 0;
    }
  }();
  return cap;
}

}  // namespace

int max_threads() {
  int o = g_override.load();
  if (o > 0) return o;
#ifdef _OPENMP
  int hw = omp_get_max_threads();
#else
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw <= 0) hw = 1;
#endif
  int cap = env_cap();
  return cap > 0 && cap < hw ? cap : hw;
}

void set_threads(int n) { g_override.store(n > 0 ? n : 0); }

}  // namespace dfa
