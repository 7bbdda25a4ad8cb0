#pragma once

#include <string_view>

namespace dce::log {

enum class Level { Error = 0, Warn = 1, Info = 2, Debug = 3 };

// Threshold is read once from DCE_SPHERE_LOG (error|warn|info|debug, or 0-3).
// Default: warn.
Level threshold();
bool enabled(Level level);
void write(Level level, std::string_view message);

inline void error(std::string_view m) { write(Level::Error, m); }
inline void warn(std::string_view m) { write(Level::Warn, m); }
inline void info(std::string_view m) { write(Level::Info, m); }
inline void debug(std::string_view m) { write(Level::Debug, m); }

}  // namespace dce::log
