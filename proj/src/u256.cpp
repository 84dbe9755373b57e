#include "alens/u256.hpp"

#include <cstring>

namespace alens {

using u128 = unsigned __int128;

std::optional<U256> checked_add(const U256& a, const U256& b) {
    U256 out;
    uint64_t carry = 0;
    for (int i = 0; i < 4; ++i) {
        u128 s = (u128)a.limbs[i] + b.limbs[i] + carry;
        out.limbs[i] = (uint64_t)s;
        carry = (uint64_t)(s >> 64);
    }
    if (carry)
        return std::nullopt;
    return out;
}

std::optional<U256> checked_sub(const U256& a, const U256& b) {
    U256 out;
    uint64_t borrow = 0;
    for (int i = 0; i < 4; ++i) {
        u128 d = (u128)a.limbs[i] - b.limbs[i] - borrow;
        out.limbs[i] = (uint64_t)d;
        borrow = (uint64_t)(d >> 64) ? 1 : 0;
    }
    if (borrow)
        return std::nullopt;
    return out;
}

namespace {

// v = v * m + add; returns the carry limb (nonzero means overflow past 256 bits).
uint64_t mul_small_add(U256& v, uint64_t m, uint64_t add) {
    uint64_t carry = add;
    for (int i = 0; i < 4; ++i) {
        u128 p = (u128)v.limbs[i] * m + carry;
        v.limbs[i] = (uint64_t)p;
        carry = (uint64_t)(p >> 64);
    }
    return carry;
}

// v /= d; returns the remainder. d must be nonzero.
template <size_t N>
uint64_t divmod_small(std::array<uint64_t, N>& limbs, uint64_t d) {
    uint64_t rem = 0;
    for (int i = (int)N - 1; i >= 0; --i) {
        u128 cur = ((u128)rem << 64) | limbs[i];
        limbs[i] = (uint64_t)(cur / d);
        rem = (uint64_t)(cur % d);
    }
    return rem;
}

template <size_t N>
bool all_zero(const std::array<uint64_t, N>& limbs) {
    for (uint64_t l : limbs)
        if (l)
            return false;
    return true;
}

constexpr uint64_t kPow10_19 = 10000000000000000000ull;

// Renders limbs to decimal by repeated division by 10^19.
template <size_t N>
std::string limbs_to_decimal(std::array<uint64_t, N> limbs) {
    if (all_zero(limbs))
        return "0";
    std::string out;
    while (!all_zero(limbs)) {
        uint64_t chunk = divmod_small(limbs, kPow10_19);
        if (all_zero(limbs)) {
            out.insert(0, std::to_string(chunk));
        } else {
            char buf[20];
            for (int i = 18; i >= 0; --i) {
                buf[i] = (char)('0' + chunk % 10);
                chunk /= 10;
            }
            out.insert(0, buf, 19);
        }
    }
    return out;
}

}  // namespace

std::optional<U256> u256_from_decimal(std::string_view text) {
    if (text.empty())
        return std::nullopt;
    U256 v;
    for (char c : text) {
        if (c < '0' || c > '9')
            return std::nullopt;
        if (mul_small_add(v, 10, (uint64_t)(c - '0')))
            return std::nullopt;
    }
    return v;
}

std::string to_decimal(const U256& v) {
    return limbs_to_decimal(v.limbs);
}

U256 u256_from_be(std::span<const uint8_t, 32> word) {
    U256 v;
    for (int i = 0; i < 4; ++i) {
        uint64_t limb = 0;
        for (int b = 0; b < 8; ++b)
            limb = (limb << 8) | word[(size_t)(3 - i) * 8 + (size_t)b];
        v.limbs[i] = limb;
    }
    return v;
}

std::array<uint8_t, 32> u256_to_be(const U256& v) {
    std::array<uint8_t, 32> out;
    for (int i = 0; i < 4; ++i) {
        uint64_t limb = v.limbs[i];
        for (int b = 7; b >= 0; --b) {
            out[(size_t)(3 - i) * 8 + (size_t)b] = (uint8_t)limb;
            limb >>= 8;
        }
    }
    return out;
}

void WideSum::add(const U256& v) {
    uint64_t carry = 0;
    for (int i = 0; i < 8; ++i) {
        uint64_t in = i < 4 ? v.limbs[i] : 0;
        u128 s = (u128)limbs[i] + in + carry;
        limbs[i] = (uint64_t)s;
        carry = (uint64_t)(s >> 64);
    }
    // 512 bits cannot overflow from sums of 256-bit values in practice
    // (would need 2^256 additions).
}

void WideSum::add(const WideSum& other) {
    uint64_t carry = 0;
    for (int i = 0; i < 8; ++i) {
        u128 s = (u128)limbs[i] + other.limbs[i] + carry;
        limbs[i] = (uint64_t)s;
        carry = (uint64_t)(s >> 64);
    }
}

bool WideSum::is_zero() const {
    return all_zero(limbs);
}

bool WideSum::equals(const U256& v) const {
    for (int i = 4; i < 8; ++i)
        if (limbs[i])
            return false;
    for (int i = 0; i < 4; ++i)
        if (limbs[i] != v.limbs[i])
            return false;
    return true;
}

std::string WideSum::to_decimal() const {
    return limbs_to_decimal(limbs);
}

}  // namespace alens
