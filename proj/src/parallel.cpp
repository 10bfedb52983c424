#include "oculo/parallel.hpp"

#include <condition_variable>
#include <mutex>
#include <thread>

namespace oculo {

namespace {

std::mutex g_mutex;
std::condition_variable g_cv;
int g_limit = 0;  // 0 = hardware default
int g_active = 0;

int effective_limit() {
    if (g_limit > 0) {
        return g_limit;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 4 : static_cast<int>(hw);
}

}  // namespace

void set_max_workers(int n) {
    {
        std::lock_guard<std::mutex> lock(g_mutex);
        g_limit = n > 0 ? n : 0;
    }
    g_cv.notify_all();
}

int max_workers() {
    std::lock_guard<std::mutex> lock(g_mutex);
    return effective_limit();
}

WorkerSlot::WorkerSlot() {
    std::unique_lock<std::mutex> lock(g_mutex);
    g_cv.wait(lock, [] { return g_active < effective_limit(); });
    ++g_active;
}

WorkerSlot::~WorkerSlot() {
    {
        std::lock_guard<std::mutex> lock(g_mutex);
        --g_active;
    }
    g_cv.notify_one();
}

}  // namespace oculo
