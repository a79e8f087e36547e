#pragma once

#include <cstdio>
#include <string>

namespace kreinlab {

// Shortest round-trippable decimal form; all CSV output goes through this so
// artifacts are byte-reproducible.
inline std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace kreinlab
