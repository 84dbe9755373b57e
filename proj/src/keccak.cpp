#include "alens/keccak.hpp"

#include <cstring>

namespace alens {

namespace {

constexpr int kRounds = 24;
constexpr size_t kRate = 136;  // bytes absorbed per block at 256-bit output

constexpr uint64_t kRC[kRounds] = {
    0x0000000000000001ull, 0x0000000000008082ull, 0x800000000000808aull,
    0x8000000080008000ull, 0x000000000000808bull, 0x0000000080000001ull,
    0x8000000080008081ull, 0x8000000000008009ull, 0x000000000000008aull,
    0x0000000000000088ull, 0x0000000080008009ull, 0x000000008000000aull,
    0x000000008000808bull, 0x800000000000008bull, 0x8000000000008089ull,
    0x8000000000008003ull, 0x8000000000008002ull, 0x8000000000000080ull,
    0x000000000000800aull, 0x800000008000000aull, 0x8000000080008081ull,
    0x8000000000008080ull, 0x0000000080000001ull, 0x8000000080008008ull};

constexpr int kRotc[24] = {1,  3,  6,  10, 15, 21, 28, 36, 45, 55, 2,  14,
                           27, 41, 56, 8,  25, 43, 62, 18, 39, 61, 20, 44};

constexpr int kPiln[24] = {10, 7,  11, 17, 18, 3, 5,  16, 8,  21, 24, 4,
                           15, 23, 19, 13, 12, 2, 20, 14, 22, 9,  6,  1};

inline uint64_t rotl64(uint64_t v, int n) {
    return (v << n) | (v >> (64 - n));
}

void keccakf(uint64_t st[25]) {
    uint64_t bc[5];
    for (int round = 0; round < kRounds; ++round) {
        // theta
        for (int i = 0; i < 5; ++i)
            bc[i] = st[i] ^ st[i + 5] ^ st[i + 10] ^ st[i + 15] ^ st[i + 20];
        for (int i = 0; i < 5; ++i) {
            uint64_t t = bc[(i + 4) % 5] ^ rotl64(bc[(i + 1) % 5], 1);
            for (int j = 0; j < 25; j += 5)
                st[j + i] ^= t;
        }
        // rho + pi
        uint64_t t = st[1];
        for (int i = 0; i < 24; ++i) {
            int j = kPiln[i];
            bc[0] = st[j];
            st[j] = rotl64(t, kRotc[i]);
            t = bc[0];
        }
        // chi
        for (int j = 0; j < 25; j += 5) {
            for (int i = 0; i < 5; ++i)
                bc[i] = st[j + i];
            for (int i = 0; i < 5; ++i)
                st[j + i] ^= (~bc[(i + 1) % 5]) & bc[(i + 2) % 5];
        }
        // iota
        st[0] ^= kRC[round];
    }
}

}  // namespace

std::array<uint8_t, 32> keccak256(const uint8_t* data, size_t len) {
    uint64_t st[25] = {};
    uint8_t block[kRate];

    while (len >= kRate) {
        for (size_t i = 0; i < kRate / 8; ++i) {
            uint64_t w;
            std::memcpy(&w, data + i * 8, 8);
            st[i] ^= w;  // little-endian host assumed (x86/arm64)
        }
        keccakf(st);
        data += kRate;
        len -= kRate;
    }

    std::memset(block, 0, kRate);
    if (len)
        std::memcpy(block, data, len);
    block[len] = 0x01;
    block[kRate - 1] |= 0x80;
    for (size_t i = 0; i < kRate / 8; ++i) {
        uint64_t w;
        std::memcpy(&w, block + i * 8, 8);
        st[i] ^= w;
    }
    keccakf(st);

    std::array<uint8_t, 32> out;
    std::memcpy(out.data(), st, 32);
    return out;
}

std::array<uint8_t, 32> keccak256(std::string_view data) {
    return keccak256(reinterpret_cast<const uint8_t*>(data.data()), data.size());
}

uint32_t selector_from_signature(std::string_view signature) {
    auto h = keccak256(signature);
    return (uint32_t)h[0] << 24 | (uint32_t)h[1] << 16 | (uint32_t)h[2] << 8 |
           (uint32_t)h[3];
}

}  // namespace alens
