#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "alens/decode.hpp"
#include "alens/ledger.hpp"
#include "alens/types.hpp"

namespace alens {

/// Quotas of scripted per-tuple histories to plant in a generated corpus.
/// Approval-only and many-to-one shapes cannot be disciplined, so they
/// carry no good/bad split; anomalous tuples start with an execution.
struct ModeRecipe {
    uint32_t m1_good = 0;
    uint32_t m1_bad = 0;
    uint32_t m2_good = 0;
    uint32_t m2_bad = 0;
    uint32_t m3 = 0;
    uint32_t m4 = 0;
    uint32_t m5_good = 0;
    uint32_t m5_bad = 0;
    uint32_t anomalous = 0;

    uint64_t total() const {
        return uint64_t{m1_good} + m1_bad + m2_good + m2_bad + m3 + m4 +
               m5_good + m5_bad + anomalous;
    }
};

/// Relative weights for filler traffic. Approval draws open a fresh scripted
/// tuple of that flavor; execution draws extend one, always leaving bounded
/// approvals with a positive residue so filler histories are never good.
struct EventMix {
    uint32_t mint = 1;
    uint32_t approve_ua = 1;
    uint32_t approve_za = 1;
    uint32_t approve_oa = 1;
    uint32_t exec = 1;
    uint32_t transfer = 1;

    uint64_t total() const {
        return uint64_t{mint} + approve_ua + approve_za + approve_oa + exec +
               transfer;
    }
};

struct GenSpec {
    uint64_t seed = 0;
    uint32_t n_users = 8;
    uint32_t n_spenders = 4;
    uint32_t n_tokens = 2;
    uint64_t n_blocks = 100;
    uint64_t n_filler = 0;  // events drawn from the mix
    EventMix mix;
    ModeRecipe recipe;
    uint32_t n_erc721_decoys = 0;
    uint32_t n_internal_approve_decoys = 0;
    uint32_t n_failed_decoys = 0;
    uint32_t max_txs_per_block = 64;
};

struct BehaviorTruth {
    Address owner;
    Address spender;
    Address token;
    uint32_t n_events = 0;  // approvals plus executions on the tuple
    BehaviorMode mode = BehaviorMode::Anomalous;
    bool good_practice = false;

    bool operator==(const BehaviorTruth&) const = default;
};

enum class AttackKind { Model1, Model2 };

struct VictimTruth {
    Address owner;
    Address spender;
    Address token;
    ApprovalKind kind = ApprovalKind::Other;  // flavor the victim granted
    U256 balance;                             // funded before the drain
    U256 allowance;                           // granted before the drain
    U256 stolen;                              // min(balance, allowance)

    bool operator==(const VictimTruth&) const = default;
};

struct AttackTruth {
    AttackKind kind = AttackKind::Model1;
    uint64_t drain_start_block = 0;  // first block holding drain transactions
    std::vector<VictimTruth> victims;
};

/// Everything the pipeline is expected to produce, computed from the
/// generation plan with plain arithmetic (never by running the pipeline).
/// State mirrors a replay under default settings: failed transactions
/// skipped, infeasible executions skipped, every spend decrementing.
struct GroundTruth {
    uint64_t seed = 0;
    std::vector<DecodedEvent> events;           // expected decode output, in order
    std::map<Address, TokenState> final_state;  // expected end-of-replay state
    std::vector<BehaviorTruth> behaviors;       // ordered by (owner, spender, token)
    std::optional<AttackTruth> attack;
};

struct SynthOutput {
    std::vector<TxRecord> records;  // chain order, positions strictly increasing
    TokenRegistry registry;
    GroundTruth truth;
    std::string spec_json;  // generation parameters echoed as one JSON object
};

/// Deterministic in spec.seed. Throws InfeasibleSpec when the quotas cannot
/// fit the pools or the block budget.
SynthOutput generate_corpus(const GenSpec& spec);

/// Scripted drain scenario: victims fund and approve, then the attacker
/// pulls each victim's maximum feasible amount. Model1 approvals name the
/// attacker as spender and the drains are top-level calls; Model2 approvals
/// name a legitimate contract, and the drains run as its nested frames
/// inside attacker transactions.
SynthOutput scenario_attack(AttackKind kind, uint32_t n_victims, uint64_t seed);

/// Ground truth as a single JSON document.
std::string emit_ground_truth(const SynthOutput& out);

/// Writes corpus and registry line files plus the ground-truth document.
void write_synth(const SynthOutput& out, const std::string& corpus_path,
                 const std::string& registry_path, const std::string& truth_path);

}  // namespace alens
