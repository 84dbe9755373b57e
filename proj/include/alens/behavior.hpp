#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "alens/ledger.hpp"
#include "alens/types.hpp"

namespace alens {

/// One entry in a per-(owner, spender, token) history: either an approval
/// (with its limit classification) or an execution that spent allowance.
/// Direct transfers never appear here; they do not involve the spender.
struct BehaviorEvent {
    enum class Kind : uint8_t { Approval, Execution };

    Kind kind = Kind::Approval;
    ApprovalKind approval_kind = ApprovalKind::Other;  // meaningful for approvals only
    U256 amount;
    ChainPos pos;
    std::array<uint8_t, 32> tx_hash{};

    bool operator==(const BehaviorEvent&) const = default;
};

/// A maximal run of events forming one self-contained approval round.
/// UnlimitedRound is [unlimited approval, executions..., zero approval];
/// ExactSpend is [bounded approval, executions summing to its amount].
struct PatternBlock {
    enum class Form : uint8_t { UnlimitedRound, ExactSpend };

    Form form = Form::ExactSpend;
    size_t begin = 0;  // first event index, inclusive
    size_t end = 0;    // one past the last event index

    bool operator==(const PatternBlock&) const = default;
};

/// Full ordered history for one (owner, spender, token) tuple plus its
/// classification. `decomposition` is populated only when `good_practice`
/// holds; its blocks tile `events` exactly.
struct BehaviorSequence {
    Address owner;
    Address spender;
    Address token;
    std::vector<BehaviorEvent> events;
    BehaviorMode mode = BehaviorMode::Anomalous;
    bool good_practice = false;
    std::vector<PatternBlock> decomposition;
};

/// Assigns one of the six modes from the shape of the event list alone.
/// Throws EmptySequence when there is nothing to classify.
BehaviorMode classify_mode(const std::vector<BehaviorEvent>& events);

struct GoodPracticeResult {
    bool good = false;
    std::vector<PatternBlock> blocks;  // tiling of the events; empty unless good
};

/// Judges whether the sequence shows disciplined allowance hygiene for its
/// mode: bounded approvals matched exactly by spending, or unlimited
/// approvals revoked after use. Fast left-to-right scan with backtracking
/// on block boundaries; linear memory, quadratic worst case.
GoodPracticeResult check_good_practice(const std::vector<BehaviorEvent>& events,
                                       BehaviorMode mode);

/// Reference checker: tries every segmentation of the events into
/// contiguous blocks and accepts when each block is independently a valid
/// round. Exponential; throws SequenceTooLong above `kBruteForceCap`.
inline constexpr size_t kBruteForceCap = 12;
bool brute_force_good_practice(const std::vector<BehaviorEvent>& events);

/// Runs classify_mode and check_good_practice, filling the sequence's
/// mode, good_practice, and decomposition fields.
void classify_sequence(BehaviorSequence& seq);

/// Collects approval and execution events during a replay, grouped per
/// (owner, spender, token). An optional (spender, token) filter restricts
/// collection to the listed pairs.
class BehaviorCollector : public EventSink {
  public:
    using PairFilter = std::set<std::pair<Address, Address>>;  // (spender, token)

    BehaviorCollector() = default;
    explicit BehaviorCollector(PairFilter filter) : filter_(std::move(filter)) {}

    void on_approval(const ApprovalEvent& ev) override;
    void on_execution(const ExecutionEvent& ev) override;

    /// Classified sequences ordered by (owner, spender, token). Leaves the
    /// collector empty.
    std::vector<BehaviorSequence> take_sequences();

  private:
    bool wanted(const Address& spender, const Address& token) const;

    struct TupleKey {
        Address owner;
        Address spender;
        Address token;
        auto operator<=>(const TupleKey&) const = default;
    };

    std::optional<PairFilter> filter_;
    std::map<TupleKey, std::vector<BehaviorEvent>> histories_;
};

/// Groups a flat decoded-event log into classified per-tuple sequences.
/// The log must already be in chain order; events within one transaction
/// keep their call order, which per-type lists would lose.
std::vector<BehaviorSequence> extract_sequences(
    const std::vector<DecodedEvent>& log,
    const std::optional<BehaviorCollector::PairFilter>& filter = std::nullopt);

/// Per-(spender, token) roll-up of the mode mix across that pair's users.
/// Percentages are tenths of a percent over the pair's non-anomalous
/// sequences; anomalous sequences are tallied separately.
struct BehaviorPairRow {
    Address spender;
    Address token;
    uint64_t identical_users = 0;        // distinct owners with any history
    std::array<uint64_t, 5> mode_counts{};  // M1..M5
    std::array<uint32_t, 5> mode_tenths{};
    uint64_t n_anomalous = 0;

    bool operator==(const BehaviorPairRow&) const = default;
};

struct BehaviorDistribution {
    std::vector<BehaviorPairRow> pairs;  // ordered by (spender, token)
    std::array<uint64_t, 5> global_counts{};
    std::array<uint32_t, 5> global_tenths{};
    uint64_t global_anomalous = 0;
};

/// Aggregates classified sequences per (spender, token). Pairs listed in
/// `requested` always get a row, all-zero when no sequence matches; without
/// a request every pair present in `seqs` gets a row.
BehaviorDistribution behavior_distribution(
    const std::vector<BehaviorSequence>& seqs,
    const std::optional<BehaviorCollector::PairFilter>& requested = std::nullopt);

}  // namespace alens
