#pragma once

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

namespace hcsa::log {

enum class Level { error = 0, warn = 1, info = 2, debug = 3 };

// Log level comes from the LOG_LEVEL environment variable (error|warn|info|debug),
// default info.
inline Level level() {
    static Level lvl = [] {
        const char* env = std::getenv("LOG_LEVEL");
        if (env == nullptr) return Level::info;
        if (std::strcmp(env, "error") == 0) return Level::error;
        if (std::strcmp(env, "warn") == 0) return Level::warn;
        if (std::strcmp(env, "debug") == 0) return Level::debug;
        return Level::info;
    }();
    return lvl;
}

inline void emit(Level lvl, const char* tag, const std::string& msg) {
    if (lvl > level()) return;
    std::fprintf(stderr, "[%s] %s\n", tag, msg.c_str());
}

inline void error(const std::string& msg) { emit(Level::error, "error", msg); }
inline void warn(const std::string& msg) { emit(Level::warn, "warn", msg); }
inline void info(const std::string& msg) { emit(Level::info, "info", msg); }
inline void debug(const std::string& msg) { emit(Level::debug, "debug", msg); }

}  // namespace hcsa::log
