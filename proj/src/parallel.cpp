#include "bubble/parallel.hpp"

namespace bubble {

namespace {
std::atomic<int> g_default_threads{0};
}

int hardware_threads() {
    const unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : static_cast<int>(n);
}

int default_threads() {
    const int n = g_default_threads.load(std::memory_order_relaxed);
    return n > 0 ? n : hardware_threads();
}

void set_default_threads(int n) {
    g_default_threads.store(n, std::memory_order_relaxed);
}

}  // namespace bubble
