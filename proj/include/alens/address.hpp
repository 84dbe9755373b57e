#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <cstring>
#include <optional>
#include <string>
#include <string_view>

namespace alens {

/// 20-byte account address. Ordering is lexicographic over the raw bytes,
/// which matches ordering of the lowercase hex form.
struct Address {
    std::array<uint8_t, 20> bytes{};

    friend constexpr bool operator==(const Address&, const Address&) = default;
    friend constexpr std::strong_ordering operator<=>(const Address& a,
                                                      const Address& b) {
        for (size_t i = 0; i < 20; ++i) {
            if (a.bytes[i] != b.bytes[i])
                return a.bytes[i] <=> b.bytes[i];
        }
        return std::strong_ordering::equal;
    }

    constexpr bool is_zero() const {
        for (uint8_t b : bytes)
            if (b)
                return false;
        return true;
    }
};

/// The burn/mint sentinel address (all zero bytes).
inline constexpr Address kZeroAddress{};

/// Parses "0x" + 40 hex digits (either case). Anything else is rejected.
std::optional<Address> address_from_hex(std::string_view text);

/// Lowercase "0x"-prefixed form, always 42 characters.
std::string to_hex(const Address& a);

struct AddressHash {
    size_t operator()(const Address& a) const {
        // Addresses are high-entropy; the first bytes suffice.
        size_t h;
        static_assert(sizeof(size_t) <= 20);
        std::memcpy(&h, a.bytes.data(), sizeof(size_t));
        return h;
    }
};

}  // namespace alens
