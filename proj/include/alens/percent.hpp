#pragma once

#include <cstdint>
#include <string>

namespace alens {

/// count/total as a percentage in integer tenths (333 means 33.3%),
/// rounded half up. total == 0 yields 0.
inline uint32_t percent_tenths(uint64_t count, uint64_t total) {
    if (total == 0)
        return 0;
    return (uint32_t)((count * 2000 + total) / (2 * total));
}

/// "33.3" for 333. Always one decimal place.
inline std::string format_tenths(uint32_t tenths) {
    return std::to_string(tenths / 10) + "." + std::to_string(tenths % 10);
}

}  // namespace alens
