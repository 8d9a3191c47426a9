#include "log.hpp"

#include <cstdlib>
#include <iostream>
#include <string>

namespace excir::cli::log {
namespace {

Level threshold = Level::warn;

}  // namespace

void init_from_env() {
  const char* env = std::getenv("EXCIR_LOG");
  if (!env) return;
  const std::string v = env;
  if (v == "error") threshold = Level::error;
  else if (v == "warn" || v == "warning") threshold = Level::warn;
  else if (v == "info") threshold = Level::info;
  else if (v == "debug" || v == "trace") threshold = Level::debug;
  else std::cerr << "excir: ignoring unknown EXCIR_LOG level '" << v << "'\n";
}

bool enabled(Level level) { return level <= threshold; }

void write(Level level, std::string_view message) {
  if (!enabled(level)) return;
  static constexpr const char* names[] = {"error", "warn", "info", "debug"};
  std::cerr << "excir [" << names[static_cast<int>(level)] << "] " << message << '\n';
}

}  // namespace excir::cli::log
