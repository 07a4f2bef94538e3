#include "floquet/log.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <iostream>
#include <mutex>
#include <thread>
#include <vector>

namespace floquet {

namespace {

int initial_level() {
    const char* v = std::getenv("FLOQUET_LOG");
    if (!v) return 0;
    std::string s(v);
    if (s == "debug") return 2;
    if (s == "info") return 1;
    return std::atoi(v);
}

std::atomic<int> g_level{initial_level()};
std::atomic<int> g_threads{1};
std::mutex g_log_mutex;

}  // namespace

void set_log_level(int level) { g_level = level; }
int log_level() { return g_level; }

void log_info(const std::string& msg) {
    if (g_level < 1) return;
    std::lock_guard<std::mutex> lock(g_log_mutex);
    std::cerr << "[floquet] " << msg << '\n';
}

void log_debug(const std::string& msg) {
    if (g_level < 2) return;
    std::lock_guard<std::mutex> lock(g_log_mutex);
    std::cerr << "[floquet:debug] " << msg << '\n';
}

void set_thread_limit(int threads) { g_threads = threads; }

int thread_limit() {
    int t = g_threads;
    if (t <= 0) t = int(std::max(1u, std::thread::hardware_concurrency()));
    return t;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
    std::size_t workers = std::min<std::size_t>(std::size_t(thread_limit()), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (!err) err = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace floquet
