#include "hofa/parallel.hpp"

namespace hofa {

namespace {
std::atomic<unsigned> g_threads{1};
}

unsigned thread_count() { return g_threads.load(); }

void set_thread_count(unsigned k) { g_threads.store(k == 0 ? 1 : k); }

}  // namespace hofa
