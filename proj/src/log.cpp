#include "ergopipe/log.hpp"

#include <cstdio>
#include <cstdlib>

namespace ergopipe::log {

namespace {

Level initial_level() {
  const char* env = std::getenv("ERGOPIPE_LOG");
  if (!env) return Level::Warn;
  const std::string v(env);
  if (v == "error") return Level::Error;
  if (v == "warn") return Level::Warn;
  if (v == "info") return Level::Info;
  if (v == "debug") return Level::Debug;
  return Level::Warn;
}

Level& current() {
  static Level level = initial_level();
  return level;
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

}  // namespace

Level level() { return current(); }

void set_level(Level level) { current() = level; }

void write(Level level, const std::string& message) {
  if (static_cast<int>(level) > static_cast<int>(current())) return;
  std::fprintf(stderr, "[%s] %s\n", tag(level), message.c_str());
}

}  // namespace ergopipe::log
