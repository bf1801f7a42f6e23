#pragma once

#include <cstdio>
#include <string>

namespace qprobe::detail {

/// Round-trippable decimal representation for metadata.
inline std::string number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace qprobe::detail
