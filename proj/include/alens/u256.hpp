#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace alens {

/// Unsigned 256-bit integer for token amounts. Arithmetic never wraps
/// silently: helpers either report overflow or are total by construction.
/// Limb order is little-endian (limbs[0] holds the least significant bits).
struct U256 {
    std::array<uint64_t, 4> limbs{};

    constexpr U256() = default;
    constexpr U256(uint64_t v) : limbs{v, 0, 0, 0} {}

    static constexpr U256 max() {
        U256 v;
        v.limbs = {~0ull, ~0ull, ~0ull, ~0ull};
        return v;
    }

    constexpr bool is_zero() const {
        return (limbs[0] | limbs[1] | limbs[2] | limbs[3]) == 0;
    }
    constexpr bool is_max() const {
        return (limbs[0] & limbs[1] & limbs[2] & limbs[3]) == ~0ull;
    }

    friend constexpr bool operator==(const U256&, const U256&) = default;
    friend constexpr std::strong_ordering operator<=>(const U256& a, const U256& b) {
        for (int i = 3; i >= 0; --i) {
            if (a.limbs[i] != b.limbs[i])
                return a.limbs[i] <=> b.limbs[i];
        }
        return std::strong_ordering::equal;
    }
};

std::optional<U256> checked_add(const U256& a, const U256& b);
std::optional<U256> checked_sub(const U256& a, const U256& b);

inline const U256& min(const U256& a, const U256& b) { return b < a ? b : a; }

/// Parses a non-empty decimal string. Rejects signs, non-digits and values
/// past 2^256 - 1. Leading zeros are accepted ("007" == 7).
std::optional<U256> u256_from_decimal(std::string_view text);

std::string to_decimal(const U256& v);

/// Big-endian 32-byte ABI word conversions.
U256 u256_from_be(std::span<const uint8_t, 32> word);
std::array<uint8_t, 32> u256_to_be(const U256& v);

/// 512-bit accumulator for sums of token amounts that may exceed 2^256 - 1
/// (e.g. totals over many holders).
struct WideSum {
    std::array<uint64_t, 8> limbs{};

    void add(const U256& v);
    void add(const WideSum& other);
    bool is_zero() const;
    /// True iff the accumulated value fits a U256 and equals v.
    bool equals(const U256& v) const;
    std::string to_decimal() const;

    friend bool operator==(const WideSum&, const WideSum&) = default;
};

}  // namespace alens
