#pragma once

#include <string_view>

namespace fpc::log {

enum class Level { Debug = 0, Info = 1, Warning = 2, Quiet = 3 };

/// Messages below this level are dropped. Defaults to Warning.
void set_level(Level level) noexcept;
Level level() noexcept;

void debug(std::string_view message);
void info(std::string_view message);
void warn(std::string_view message);

}  // namespace fpc::log
