#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace alens {

/// Decodes "0x"-prefixed hex of even length into bytes. "0x" alone yields
/// an empty vector. Odd length or non-hex characters are rejected.
std::optional<std::vector<uint8_t>> bytes_from_hex(std::string_view text);

/// Lowercase "0x"-prefixed encoding.
std::string to_hex(std::span<const uint8_t> bytes);

inline int hex_nibble(char c) {
    if (c >= '0' && c <= '9')
        return c - '0';
    if (c >= 'a' && c <= 'f')
        return c - 'a' + 10;
    if (c >= 'A' && c <= 'F')
        return c - 'A' + 10;
    return -1;
}

}  // namespace alens
