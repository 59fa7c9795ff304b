#ifndef BEAMLATTICE_LOG_HPP
#define BEAMLATTICE_LOG_HPP

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace beamlattice {

enum class LogLevel { kError = 0, kInfo = 1, kDebug = 2 };

// BEAMLATTICE_LOG={error|info|debug}, default error. Read once.
inline LogLevel log_level() {
  static const LogLevel level = [] {
    const char* v = std::getenv("BEAMLATTICE_LOG");
    if (!v) return LogLevel::kError;
    if (std::strcmp(v, "debug") == 0) return LogLevel::kDebug;
    if (std::strcmp(v, "info") == 0) return LogLevel::kInfo;
    return LogLevel::kError;
  }();
  return level;
}

template <typename... Args>
void log_at(LogLevel lvl, const char* fmt, Args... args) {
  if (lvl > log_level()) return;
  const char* tag = lvl == LogLevel::kError  ? "E"
                    : lvl == LogLevel::kInfo ? "I"
                                             : "D";
  std::fprintf(stderr, "[%s] ", tag);
  std::fprintf(stderr, fmt, args...);
  std::fputc('\n', stderr);
}

inline void log_at(LogLevel lvl, const char* msg) { log_at(lvl, "%s", msg); }

}  // namespace beamlattice

#endif
