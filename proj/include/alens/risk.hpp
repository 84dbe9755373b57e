#pragma once

// Exposure quantification per (owner, spender, token): how much a spender
// could take right now, the coarse level, aggregate distributions, and an
// adversarial simulation used to validate the closed form.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "alens/ledger.hpp"
#include "alens/types.hpp"

namespace alens {

/// min(allowance[owner][spender], balance[owner]): the most the spender
/// can move out of the owner's holdings.
U256 risk_amount(const TokenState& state, const Address& owner,
                 const Address& spender);

/// NoRisk iff allowance == 0; LowRisk iff allowance > 0 and balance == 0;
/// HighRisk iff both > 0.
RiskLevel risk_level(const TokenState& state, const Address& owner,
                     const Address& spender);

struct RiskRow {
    Address owner;
    Address spender;
    U256 amount;
    RiskLevel level = RiskLevel::NoRisk;
};

/// One row per (owner, spender) with approval history, in address order.
/// Fully revoked pairs appear with amount 0 / NoRisk.
std::vector<RiskRow> risk_rows(const TokenState& state);

struct RiskDistribution {
    uint64_t user_count = 0;  // distinct owners with approval history
    uint64_t users_no = 0;
    uint64_t users_low = 0;
    uint64_t users_high = 0;
    // Percentages in tenths (333 = 33.3), rounded half up.
    uint32_t tenths_no = 0;
    uint32_t tenths_low = 0;
    uint32_t tenths_high = 0;
};

/// Per-user distribution for one token. A user facing several spenders is
/// counted once at the worst of their levels. Throws TokenAbsent if the
/// state has no entry for the token.
RiskDistribution risk_distribution(const LedgerState& state, const Address& token);

enum class SeriesMetric { SumRiskAmount, LevelCounts };

struct SeriesRow {
    uint64_t block = 0;
    std::string metric;
    std::string value;  // decimal; sums can exceed 256 bits
};

/// One row per checkpoint for SumRiskAmount; three (per level) for
/// LevelCounts. Checkpoints predating the token's first approval produce
/// zero values. Throws TokenAbsent if no snapshot contains the token.
std::vector<SeriesRow> risk_series(const std::vector<Snapshot>& snapshots,
                                   const Address& token, SeriesMetric metric);

struct LootResult {
    /// Stolen per owner, in owner address order; one entry per owner with
    /// approval history toward the spender.
    std::vector<std::pair<Address, U256>> per_owner;
    WideSum total;
};

/// Simulates a malicious spender draining every approving owner through
/// repeated maximal delegated transfers under real ledger semantics. The
/// input state is not modified. Loot lands on a fresh sink address so
/// self-approvals measure correctly.
LootResult attacker_oracle(const TokenState& state, const Address& spender);

}  // namespace alens
