#pragma once

#include <fmt/core.h>

#include <string_view>

namespace gpp::log {

enum class Level { quiet = 0, normal = 1, verbose = 2 };

void set_level(Level level) noexcept;
Level level() noexcept;

void write(Level at, std::string_view prefix, std::string_view message);

template <typename... Args>
void info(fmt::format_string<Args...> f, Args&&... args) {
    if (level() >= Level::verbose) write(Level::verbose, "info", fmt::format(f, std::forward<Args>(args)...));
}

template <typename... Args>
void warn(fmt::format_string<Args...> f, Args&&... args) {
    if (level() >= Level::normal) write(Level::normal, "warning", fmt::format(f, std::forward<Args>(args)...));
}

}  // namespace gpp::log
