#include "dce_sphere/log.hpp"

#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string>

namespace dce::log {

namespace {

Level parse_level(const char* text) {
  if (text == nullptr) return Level::Warn;
  const std::string v(text);
  if (v == "error" || v == "0") return Level::Error;
  if (v == "warn" || v == "warning" || v == "1") return Level::Warn;
  if (v == "info" || v == "2") return Level::Info;
  if (v == "debug" || v == "3") return Level::Debug;
  return Level::Warn;
}

const char* tag(Level level) {
  switch (level) {
    case Level::Error: return "error";
    case Level::Warn: return "warn";
    case Level::Info: return "info";
    case Level::Debug: return "debug";
  }
  return "?";
}

std::mutex& sink_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

Level threshold() {
  static const Level level = parse_level(std::getenv("DCE_SPHERE_LOG"));
  return level;
}

bool enabled(Level level) {
  return static_cast<int>(level) <= static_cast<int>(threshold());
}

void write(Level level, std::string_view message) {
  if (!enabled(level)) return;
  std::lock_guard<std::mutex> lock(sink_mutex());
  std::cerr << "[dce_sphere " << tag(level) << "] " << message << '\n';
}

}  // namespace dce::log
