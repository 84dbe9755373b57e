#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "alens/address.hpp"
#include "alens/u256.hpp"

namespace alens {

/// One call in a transaction's trace. depth 0 is the outermost call.
struct CallFrame {
    Address caller;
    Address callee;
    std::vector<uint8_t> input;
    uint32_t depth = 0;

    friend bool operator==(const CallFrame&, const CallFrame&) = default;
};

enum class TxStatus { Ok, Fail };

/// A transaction with its full call trace, as stored in corpus files.
struct TxRecord {
    std::array<uint8_t, 32> tx_hash{};
    uint64_t block = 0;
    uint32_t index = 0;
    uint64_t nonce = 0;
    TxStatus status = TxStatus::Ok;
    std::vector<CallFrame> frames;

    friend bool operator==(const TxRecord&, const TxRecord&) = default;
};

/// Canonical position of a transaction on chain. Total order.
struct ChainPos {
    uint64_t block = 0;
    uint32_t index = 0;

    friend constexpr auto operator<=>(const ChainPos&, const ChainPos&) = default;
};

enum class TokenStandard { Erc20, Erc721, Unknown };

struct TokenInfo {
    Address address;
    TokenStandard standard = TokenStandard::Unknown;
    std::optional<U256> total_supply;
    std::optional<uint32_t> decimals;
};

/// Token metadata keyed by contract address.
using TokenRegistry = std::map<Address, TokenInfo>;

/// Approval amount classes: unlimited, zero (revocation), other.
enum class ApprovalKind { Unlimited, Zero, Other };

struct ApprovalEvent {
    ChainPos pos;
    std::array<uint8_t, 32> tx_hash{};
    Address token;
    Address owner;
    Address spender;
    U256 amount;
    ApprovalKind kind = ApprovalKind::Other;

    friend bool operator==(const ApprovalEvent&, const ApprovalEvent&) = default;
};

/// A delegated transfer (transferFrom) moving owner's tokens via spender.
struct ExecutionEvent {
    ChainPos pos;
    std::array<uint8_t, 32> tx_hash{};
    Address token;
    Address owner;
    Address spender;
    Address receiver;
    U256 amount;

    friend bool operator==(const ExecutionEvent&, const ExecutionEvent&) = default;
};

/// A direct transfer. from == zero address mints, to == zero address burns.
struct TransferEvent {
    ChainPos pos;
    std::array<uint8_t, 32> tx_hash{};
    Address token;
    Address from;
    Address to;
    U256 amount;

    friend bool operator==(const TransferEvent&, const TransferEvent&) = default;
};

enum class RiskLevel { NoRisk, LowRisk, HighRisk };

/// Per-(owner, spender, token) interaction shapes:
///   OneToOne      single approval, single spend
///   OneToMany     single approval, several spends
///   OnlyApproval  approvals but never a spend
///   ManyToOne     several approvals, then a single spend
///   Compound      anything else that still starts with an approval
///   Anomalous     first observed event is a spend
enum class BehaviorMode {
    OneToOne,
    OneToMany,
    OnlyApproval,
    ManyToOne,
    Compound,
    Anomalous,
};

std::string_view to_string(TxStatus s);
std::string_view to_string(TokenStandard s);
std::string_view to_string(ApprovalKind k);
std::string_view to_string(RiskLevel l);
std::string_view to_string(BehaviorMode m);

std::optional<TxStatus> tx_status_from_string(std::string_view s);
std::optional<TokenStandard> token_standard_from_string(std::string_view s);
std::optional<ApprovalKind> approval_kind_from_string(std::string_view s);
std::optional<RiskLevel> risk_level_from_string(std::string_view s);
std::optional<BehaviorMode> behavior_mode_from_string(std::string_view s);

}  // namespace alens
