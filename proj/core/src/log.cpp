#include "latomo/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace latomo::log {
namespace {
std::atomic<Level> g_level{Level::info};
std::mutex g_mutex;

const char* tag(Level l) {
  switch (l) {
    case Level::debug: return "debug";
    case Level::info: return "info";
    case Level::warn: return "warn";
    case Level::error: return "error";
    default: return "";
  }
}
}  // namespace

void set_level(Level level) { g_level.store(level); }
Level level() { return g_level.load(); }

void write(Level l, std::string_view message) {
  if (l < g_level.load()) return;
  std::lock_guard lock(g_mutex);
  std::cerr << "[latomo " << tag(l) << "] " << message << '\n';
}

}  // namespace latomo::log
