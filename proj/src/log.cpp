#include "gpp/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace gpp::log {

namespace {
std::atomic<Level> g_level{Level::normal};
std::mutex g_mutex;
}  // namespace

void set_level(Level level) noexcept { g_level.store(level); }
Level level() noexcept { return g_level.load(); }

void write(Level, std::string_view prefix, std::string_view message) {
    std::lock_guard lock(g_mutex);
    std::clog << '[' << prefix << "] " << message << '\n';
}

}  // namespace gpp::log
