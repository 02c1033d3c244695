#include "kpz/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace kpz {

namespace {
std::atomic<bool> g_enabled{true};
std::mutex g_mutex;
}  // namespace

void set_warnings_enabled(bool enabled) { g_enabled = enabled; }

void log_warning(std::string_view msg) {
  if (!g_enabled) return;
  std::lock_guard lock(g_mutex);
  std::cerr << "kpz warning: " << msg << '\n';
}

}  // namespace kpz
