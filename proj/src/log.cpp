#include "fpc/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace fpc::log {

namespace {

std::atomic<Level> g_level{Level::Warning};
std::mutex g_mutex;

void emit(Level at, std::string_view tag, std::string_view message) {
  if (at < g_level.load(std::memory_order_relaxed)) return;
  std::lock_guard lock(g_mutex);
  std::cerr << "[fpc " << tag << "] " << message << '\n';
}

}  // namespace

void set_level(Level level) noexcept { g_level.store(level, std::memory_order_relaxed); }
Level level() noexcept { return g_level.load(std::memory_order_relaxed); }

void debug(std::string_view message) { emit(Level::Debug, "debug", message); }
void info(std::string_view message) { emit(Level::Info, "info", message); }
void warn(std::string_view message) { emit(Level::Warning, "warning", message); }

}  // namespace fpc::log
