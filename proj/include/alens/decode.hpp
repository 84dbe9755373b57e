#pragma once

// Selector-based extraction of token approvals and transfers from call
// frames, plus approval amount classification.

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "alens/types.hpp"

namespace alens {

// First four keccak-256 bytes of the canonical signatures.
inline constexpr uint32_t kApproveSelector = 0x095ea7b3u;
inline constexpr uint32_t kTransferFromSelector = 0x23b872ddu;
inline constexpr uint32_t kTransferSelector = 0xa9059cbbu;

/// Selector of the frame's calldata, or nullopt for inputs under 4 bytes.
std::optional<uint32_t> frame_selector(const CallFrame& frame);

enum class UnlimitedMode { Strict, Threshold };

/// Default threshold for threshold mode: 2^248.
U256 default_unlimited_threshold();

struct UaConfig {
    UnlimitedMode mode = UnlimitedMode::Strict;
    U256 threshold = default_unlimited_threshold();
};

/// Zero iff amount == 0. Unlb iff amount == 2^256-1 or equals the token's
/// known total supply; threshold mode additionally admits any
/// amount >= config.threshold. Everything else is Other.
ApprovalKind classify_approval(const U256& amount,
                               const std::optional<U256>& total_supply,
                               const UaConfig& config);

struct DecodeStats {
    uint64_t malformed_calldata = 0;  // known selector, truncated arguments
    uint64_t internal_approvals = 0;  // approve selector at depth > 0
    uint64_t erc721_filtered = 0;     // approvals dropped by registry tag
    uint64_t failed_skipped = 0;      // failed transactions not decoded

    friend bool operator==(const DecodeStats&, const DecodeStats&) = default;
};

/// Approval from the external frame only: depth-0 approve call to a token
/// not tagged erc721, with both argument words present. Internal approve
/// frames are counted, never decoded.
std::optional<ApprovalEvent> decode_approve(const TxRecord& rec,
                                            const TokenRegistry& registry,
                                            const UaConfig& ua,
                                            DecodeStats* stats = nullptr);

/// Delegated transfers from any frame (any depth) in frame order. The
/// spender is the frame's caller, never an argument.
std::vector<ExecutionEvent> decode_execution(const TxRecord& rec,
                                             DecodeStats* stats = nullptr);

/// Direct transfers from any frame in frame order. The sender is the
/// frame's caller.
std::vector<TransferEvent> decode_transfer(const TxRecord& rec,
                                           DecodeStats* stats = nullptr);

using DecodedEvent = std::variant<ApprovalEvent, ExecutionEvent, TransferEvent>;

struct DecodeConfig {
    UaConfig ua;
    bool include_failed = false;
};

/// Stateful wrapper that gates failed transactions and accumulates
/// diagnostics across a whole corpus.
class Decoder {
  public:
    Decoder(const TokenRegistry* registry, DecodeConfig config = {})
        : registry_(registry), config_(config) {}

    /// All token events of one record, in frame order.
    std::vector<DecodedEvent> decode(const TxRecord& rec);

    const DecodeStats& stats() const { return stats_; }

  private:
    const TokenRegistry* registry_;
    DecodeConfig config_;
    DecodeStats stats_;
};

}  // namespace alens
