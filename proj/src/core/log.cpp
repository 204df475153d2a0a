#include "hcs/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace hcs::log {
namespace {

std::atomic<Level> g_level{Level::Info};
std::mutex g_mutex;

void emit(Level lvl, const char* tag, const std::string& message) {
    if (lvl < g_level.load()) return;
    std::lock_guard<std::mutex> lock(g_mutex);
    std::cerr << '[' << tag << "] " << message << '\n';
}

}  // namespace

void set_level(Level level) { g_level.store(level); }
Level level() { return g_level.load(); }

void debug(const std::string& message) { emit(Level::Debug, "debug", message); }
void info(const std::string& message) { emit(Level::Info, "info", message); }
void warn(const std::string& message) { emit(Level::Warn, "warn", message); }
void error(const std::string& message) { emit(Level::Error, "error", message); }

}  // namespace hcs::log
