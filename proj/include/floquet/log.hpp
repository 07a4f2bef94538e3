#pragma once

#include <cstddef>
#include <functional>
#include <string>

namespace floquet {

// 0 silent, 1 info, 2 debug. Initialized from FLOQUET_LOG.
void set_log_level(int level);
int log_level();
void log_info(const std::string& msg);
void log_debug(const std::string& msg);

// Worker cap used by parallel_for; 0 means hardware concurrency.
void set_thread_limit(int threads);
int thread_limit();
// Runs body(i) for i in [0, count); each index writes only its own outputs,
// so results do not depend on scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace floquet
