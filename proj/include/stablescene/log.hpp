#pragma once

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

namespace stablescene::logging {

// STABLESCENE_LOG: error | warn | info | debug (default warn)
inline int level() {
    static const int lvl = [] {
        const char* env = std::getenv("STABLESCENE_LOG");
        if (!env) return 1;
        if (!std::strcmp(env, "error")) return 0;
        if (!std::strcmp(env, "info")) return 2;
        if (!std::strcmp(env, "debug")) return 3;
        return 1;
    }();
    return lvl;
}

inline void write(int lvl, const char* tag, const std::string& msg) {
    if (lvl > level()) return;
    std::fprintf(stderr, "[%s] %s\n", tag, msg.c_str());
}

inline void error(const std::string& m) { write(0, "error", m); }
inline void warn(const std::string& m) { write(1, "warn", m); }
inline void info(const std::string& m) { write(2, "info", m); }
inline void debug(const std::string& m) { write(3, "debug", m); }

} // namespace stablescene::logging
