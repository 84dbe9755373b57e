#pragma once

// Token state replay: applies decoded events in canonical order to
// per-token balance/allowance maps and materializes checkpoint snapshots.

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "alens/decode.hpp"
#include "alens/ingest.hpp"
#include "alens/types.hpp"
#include "alens/u256.hpp"

namespace alens {

/// Balances and allowances of one token contract. Absent keys mean 0;
/// zero-valued entries are pruned on write, so equal states compare equal.
struct TokenState {
    std::map<Address, U256> balance_of;
    std::map<std::pair<Address, Address>, U256> allowance;
    /// Every (owner, spender) that ever had an approval applied, kept after
    /// revocation so fully-revoked users still show up in statistics.
    std::set<std::pair<Address, Address>> approved_pairs;

    U256 balance(const Address& a) const {
        auto it = balance_of.find(a);
        return it == balance_of.end() ? U256(0) : it->second;
    }
    U256 allowance_of(const Address& owner, const Address& spender) const {
        auto it = allowance.find({owner, spender});
        return it == allowance.end() ? U256(0) : it->second;
    }

    friend bool operator==(const TokenState&, const TokenState&) = default;
};

struct LedgerState {
    std::map<Address, TokenState> tokens;
    /// Position of the last applied event; events must not precede it.
    std::optional<ChainPos> cursor;

    TokenState& token(const Address& t) { return tokens[t]; }
    const TokenState* find_token(const Address& t) const {
        auto it = tokens.find(t);
        return it == tokens.end() ? nullptr : &it->second;
    }

    friend bool operator==(const LedgerState&, const LedgerState&) = default;
};

enum class OnInsufficient { SkipAndCount, Clamp, Halt };

struct LedgerConfig {
    /// Leave an allowance stored as exactly 2^256-1 untouched by spends.
    bool infinite_allowance_no_decrement = false;
    OnInsufficient on_insufficient = OnInsufficient::SkipAndCount;
};

struct LedgerStats {
    uint64_t infeasible_skipped = 0;  // events dropped for missing funds/allowance
    uint64_t clamped = 0;             // events applied at a reduced amount
    WideSum total_minted;             // applied amounts out of the zero address
    WideSum total_burned;             // applied amounts into the zero address
};

/// Each mutator validates the event position against the cursor
/// (OrderViolation if it precedes; equality is fine, several events share
/// one transaction) and advances it.

/// Overwrites the (owner, spender) allowance with ev.amount.
void apply_approval(LedgerState& state, const ApprovalEvent& ev);

/// Moves owner -> receiver by ev.amount and decrements the spender's
/// allowance, when both the balance and the allowance cover it; otherwise
/// follows config.on_insufficient.
void apply_transfer_from(LedgerState& state, const ExecutionEvent& ev,
                         const LedgerConfig& config, LedgerStats* stats = nullptr);

/// Direct balance movement. from == zero address mints, to == zero address
/// burns. Allowances are never touched.
void apply_transfer(LedgerState& state, const TransferEvent& ev,
                    const LedgerConfig& config, LedgerStats* stats = nullptr);

void apply_event(LedgerState& state, const DecodedEvent& ev,
                 const LedgerConfig& config, LedgerStats* stats = nullptr);

/// Observer for the decoded event stream in canonical order. Called for
/// every decoded event, including ones the ledger then skips as infeasible.
class EventSink {
  public:
    virtual ~EventSink() = default;
    virtual void on_approval(const ApprovalEvent&) {}
    virtual void on_execution(const ExecutionEvent&) {}
    virtual void on_transfer(const TransferEvent&) {}
};

struct Snapshot {
    uint64_t block = 0;
    LedgerState state;
};

struct ReplayResult {
    LedgerState final_state;
    std::vector<Snapshot> snapshots;  // one per requested checkpoint block
    DecodeStats decode_stats;
    LedgerStats ledger_stats;
    uint64_t records_processed = 0;
    uint64_t events_decoded = 0;
};

/// Streams the corpus through decode and the ledger. Snapshot k holds the
/// state after every record with block <= checkpoints[k]. Checkpoints must
/// be strictly ascending (ConfigError otherwise). Deterministic: identical
/// inputs produce identical results byte for byte.
ReplayResult replay(RecordStream& stream, const TokenRegistry& registry,
                    const DecodeConfig& decode_config,
                    const LedgerConfig& ledger_config,
                    const std::vector<uint64_t>& checkpoints = {},
                    EventSink* sink = nullptr);

/// One dump line per token (no trailing newline): balances and allowances
/// in address order.
std::string emit_snapshot_dump(uint64_t block, const Address& token,
                               const TokenState& st);

/// Dump lines for every token in the state, in address order.
void write_snapshot_dump(std::ostream& out, uint64_t block, const LedgerState& state);

}  // namespace alens
