#include "alens/hex.hpp"

#include "alens/address.hpp"

namespace alens {

namespace {
constexpr char kHexDigits[] = "0123456789abcdef";
}

std::optional<std::vector<uint8_t>> bytes_from_hex(std::string_view text) {
    if (text.size() < 2 || text[0] != '0' || (text[1] != 'x' && text[1] != 'X'))
        return std::nullopt;
    text.remove_prefix(2);
    if (text.size() % 2 != 0)
        return std::nullopt;
    std::vector<uint8_t> out;
    out.reserve(text.size() / 2);
    for (size_t i = 0; i < text.size(); i += 2) {
        int hi = hex_nibble(text[i]);
        int lo = hex_nibble(text[i + 1]);
        if (hi < 0 || lo < 0)
            return std::nullopt;
        out.push_back((uint8_t)(hi << 4 | lo));
    }
    return out;
}

std::string to_hex(std::span<const uint8_t> bytes) {
    std::string out;
    out.reserve(2 + bytes.size() * 2);
    out += "0x";
    for (uint8_t b : bytes) {
        out += kHexDigits[b >> 4];
        out += kHexDigits[b & 0xf];
    }
    return out;
}

std::optional<Address> address_from_hex(std::string_view text) {
    if (text.size() != 42 || text[0] != '0' || (text[1] != 'x' && text[1] != 'X'))
        return std::nullopt;
    Address a;
    for (size_t i = 0; i < 20; ++i) {
        int hi = hex_nibble(text[2 + i * 2]);
        int lo = hex_nibble(text[3 + i * 2]);
        if (hi < 0 || lo < 0)
            return std::nullopt;
        a.bytes[i] = (uint8_t)(hi << 4 | lo);
    }
    return a;
}

std::string to_hex(const Address& a) {
    return to_hex(std::span<const uint8_t>(a.bytes.data(), a.bytes.size()));
}

}  // namespace alens
