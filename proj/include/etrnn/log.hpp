#pragma once

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>

namespace etrnn::log {

enum class Level { off = 0, error = 1, warn = 2, info = 3, debug = 4 };

// Level comes from the ETRNN_LOG environment variable, read once.
inline Level threshold() {
    static Level lv = [] {
        const char* s = std::getenv("ETRNN_LOG");
        if (!s) return Level::off;
        std::string v(s);
        if (v == "error") return Level::error;
        if (v == "warn") return Level::warn;
        if (v == "info") return Level::info;
        if (v == "debug") return Level::debug;
        return Level::off;
    }();
    return lv;
}

inline bool enabled(Level lv) { return static_cast<int>(lv) <= static_cast<int>(threshold()); }

inline void write(Level lv, const std::string& msg) {
    if (!enabled(lv)) return;
    static const char* names[] = {"off", "error", "warn", "info", "debug"};
    std::cerr << "[etrnn " << names[static_cast<int>(lv)] << "] " << msg << "\n";
}

inline void error(const std::string& m) { write(Level::error, m); }
inline void warn(const std::string& m) { write(Level::warn, m); }
inline void info(const std::string& m) { write(Level::info, m); }
inline void debug(const std::string& m) { write(Level::debug, m); }

} // namespace etrnn::log
