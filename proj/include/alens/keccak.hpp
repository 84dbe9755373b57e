#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string_view>

namespace alens {

/// Keccak-256 as used by Ethereum (original padding 0x01, not the
/// NIST SHA-3 variant).
std::array<uint8_t, 32> keccak256(const uint8_t* data, size_t len);
std::array<uint8_t, 32> keccak256(std::string_view data);

/// First four bytes of keccak256(signature), big-endian packed.
/// `signature` is a canonical ABI signature like "approve(address,uint256)".
uint32_t selector_from_signature(std::string_view signature);

}  // namespace alens
