#include "alens/behavior.hpp"

#include <variant>

#include "alens/errors.hpp"
#include "alens/percent.hpp"

namespace alens {

namespace {

bool is_exec(const BehaviorEvent& ev) {
    return ev.kind == BehaviorEvent::Kind::Execution;
}

bool is_approval_of(const BehaviorEvent& ev, ApprovalKind kind) {
    return ev.kind == BehaviorEvent::Kind::Approval && ev.approval_kind == kind;
}

/// Memoized suffix matcher for the compound pattern. memo result for index
/// i says whether events[i..) tiles into valid rounds; the only branching
/// is the cut point of a bounded round, where zero-amount executions can
/// leave several prefixes with the same sum.
class BlockMatcher {
  public:
    explicit BlockMatcher(const std::vector<BehaviorEvent>& events)
        : events_(events), memo_(events.size() + 1, State::Unknown) {
        memo_[events.size()] = State::Yes;
    }

    bool matches_from(size_t i) {
        if (memo_[i] == State::Unknown)
            memo_[i] = solve(i) ? State::Yes : State::No;
        return memo_[i] == State::Yes;
    }

    /// Rebuilds the tiling after a successful matches_from(0) by replaying
    /// the same choices and keeping the first cut that still matches.
    std::vector<PatternBlock> blocks() {
        std::vector<PatternBlock> out;
        const size_t n = events_.size();
        size_t i = 0;
        while (i < n) {
            const size_t end = block_end_at(i);
            const auto form = events_[i].approval_kind == ApprovalKind::Unlimited
                                  ? PatternBlock::Form::UnlimitedRound
                                  : PatternBlock::Form::ExactSpend;
            out.push_back({form, i, end});
            i = end;
        }
        return out;
    }

  private:
    enum class State : uint8_t { Unknown, Yes, No };

    bool solve(size_t i) {
        const size_t n = events_.size();
        const auto& head = events_[i];
        if (head.kind != BehaviorEvent::Kind::Approval) return false;
        if (head.approval_kind == ApprovalKind::Unlimited) {
            // The run of executions is maximal by construction: nothing but
            // the closing zero approval may interrupt it.
            size_t j = i + 1;
            while (j < n && is_exec(events_[j])) ++j;
            return j > i + 1 && j < n &&
                   is_approval_of(events_[j], ApprovalKind::Zero) &&
                   matches_from(j + 1);
        }
        if (head.approval_kind == ApprovalKind::Other) {
            std::optional<U256> sum = U256{};
            for (size_t j = i + 1; j < n && is_exec(events_[j]); ++j) {
                sum = checked_add(*sum, events_[j].amount);
                if (!sum || head.amount < *sum) break;  // sums never shrink
                if (*sum == head.amount && matches_from(j + 1)) return true;
            }
            return false;
        }
        return false;  // zero approvals only close rounds
    }

    size_t block_end_at(size_t i) {
        const size_t n = events_.size();
        const auto& head = events_[i];
        if (head.approval_kind == ApprovalKind::Unlimited) {
            size_t j = i + 1;
            while (j < n && is_exec(events_[j])) ++j;
            return j + 1;  // include the closing zero approval
        }
        std::optional<U256> sum = U256{};
        for (size_t j = i + 1; j < n && is_exec(events_[j]); ++j) {
            sum = checked_add(*sum, events_[j].amount);
            if (!sum || head.amount < *sum) break;
            if (*sum == head.amount && matches_from(j + 1)) return j + 1;
        }
        return n;  // unreachable when the precondition holds
    }

    const std::vector<BehaviorEvent>& events_;
    std::vector<State> memo_;
};

size_t mode_index(BehaviorMode mode) {
    return static_cast<size_t>(mode);  // OneToOne..Compound map to 0..4
}

/// One contiguous slice as a standalone round, checked from scratch with no
/// shared state; the reference for the production matcher.
bool valid_round(const std::vector<BehaviorEvent>& ev, size_t begin, size_t end) {
    if (end - begin < 2) return false;
    const auto& head = ev[begin];
    if (head.kind != BehaviorEvent::Kind::Approval) return false;
    if (head.approval_kind == ApprovalKind::Unlimited) {
        if (end - begin < 3) return false;  // approval, execution, revocation
        if (!is_approval_of(ev[end - 1], ApprovalKind::Zero)) return false;
        for (size_t i = begin + 1; i + 1 < end; ++i)
            if (!is_exec(ev[i])) return false;
        return true;
    }
    if (head.approval_kind == ApprovalKind::Other) {
        std::optional<U256> sum = U256{};
        for (size_t i = begin + 1; i < end; ++i) {
            if (!is_exec(ev[i])) return false;
            sum = checked_add(*sum, ev[i].amount);
            if (!sum) return false;
        }
        return *sum == head.amount;
    }
    return false;
}

}  // namespace

BehaviorMode classify_mode(const std::vector<BehaviorEvent>& events) {
    if (events.empty())
        throw EmptySequence("cannot classify an empty event sequence");
    if (is_exec(events.front())) return BehaviorMode::Anomalous;
    size_t first_exec = 0;
    while (first_exec < events.size() && !is_exec(events[first_exec])) ++first_exec;
    const size_t n_approvals = first_exec;
    if (first_exec == events.size()) return BehaviorMode::OnlyApproval;
    for (size_t i = first_exec + 1; i < events.size(); ++i)
        if (!is_exec(events[i])) return BehaviorMode::Compound;
    const size_t n_execs = events.size() - first_exec;
    if (n_approvals == 1)
        return n_execs == 1 ? BehaviorMode::OneToOne : BehaviorMode::OneToMany;
    return n_execs == 1 ? BehaviorMode::ManyToOne : BehaviorMode::Compound;
}

GoodPracticeResult check_good_practice(const std::vector<BehaviorEvent>& events,
                                       BehaviorMode mode) {
    GoodPracticeResult res;
    switch (mode) {
        case BehaviorMode::OneToOne: {
            const auto& a = events.front();
            if (a.approval_kind == ApprovalKind::Other && a.amount == events[1].amount) {
                res.good = true;
                res.blocks = {{PatternBlock::Form::ExactSpend, 0, events.size()}};
            }
            return res;
        }
        case BehaviorMode::OneToMany: {
            const auto& a = events.front();
            if (a.approval_kind != ApprovalKind::Other) return res;
            std::optional<U256> sum = U256{};
            for (size_t i = 1; i < events.size(); ++i) {
                sum = checked_add(*sum, events[i].amount);
                if (!sum) return res;
            }
            if (*sum == a.amount) {
                res.good = true;
                res.blocks = {{PatternBlock::Form::ExactSpend, 0, events.size()}};
            }
            return res;
        }
        case BehaviorMode::OnlyApproval:
        case BehaviorMode::ManyToOne:
        case BehaviorMode::Anomalous:
            return res;  // never disciplined: allowance left open or no approval
        case BehaviorMode::Compound: {
            BlockMatcher matcher(events);
            if (matcher.matches_from(0)) {
                res.good = true;
                res.blocks = matcher.blocks();
            }
            return res;
        }
    }
    return res;
}

bool brute_force_good_practice(const std::vector<BehaviorEvent>& events) {
    if (events.empty())
        throw EmptySequence("cannot check an empty event sequence");
    if (events.size() > kBruteForceCap)
        throw SequenceTooLong("brute-force checker accepts at most 12 events");
    const size_t n = events.size();
    const uint64_t cut_masks = uint64_t{1} << (n - 1);  // bit i: cut after event i
    for (uint64_t mask = 0; mask < cut_masks; ++mask) {
        size_t start = 0;
        bool ok = true;
        for (size_t i = 0; ok && i + 1 < n; ++i) {
            if (mask >> i & 1) {
                ok = valid_round(events, start, i + 1);
                start = i + 1;
            }
        }
        if (ok && valid_round(events, start, n)) return true;
    }
    return false;
}

void classify_sequence(BehaviorSequence& seq) {
    seq.mode = classify_mode(seq.events);
    auto verdict = check_good_practice(seq.events, seq.mode);
    seq.good_practice = verdict.good;
    seq.decomposition = std::move(verdict.blocks);
}

bool BehaviorCollector::wanted(const Address& spender, const Address& token) const {
    return !filter_ || filter_->contains({spender, token});
}

void BehaviorCollector::on_approval(const ApprovalEvent& ev) {
    if (!wanted(ev.spender, ev.token)) return;
    histories_[{ev.owner, ev.spender, ev.token}].push_back(
        {BehaviorEvent::Kind::Approval, ev.kind, ev.amount, ev.pos, ev.tx_hash});
}

void BehaviorCollector::on_execution(const ExecutionEvent& ev) {
    if (!wanted(ev.spender, ev.token)) return;
    histories_[{ev.owner, ev.spender, ev.token}].push_back(
        {BehaviorEvent::Kind::Execution, ApprovalKind::Other, ev.amount, ev.pos,
         ev.tx_hash});
}

std::vector<BehaviorSequence> BehaviorCollector::take_sequences() {
    std::vector<BehaviorSequence> out;
    out.reserve(histories_.size());
    for (auto& [key, events] : histories_) {
        BehaviorSequence seq;
        seq.owner = key.owner;
        seq.spender = key.spender;
        seq.token = key.token;
        seq.events = std::move(events);
        classify_sequence(seq);
        out.push_back(std::move(seq));
    }
    histories_.clear();
    return out;
}

std::vector<BehaviorSequence> extract_sequences(
    const std::vector<DecodedEvent>& log,
    const std::optional<BehaviorCollector::PairFilter>& filter) {
    BehaviorCollector collector =
        filter ? BehaviorCollector(*filter) : BehaviorCollector();
    for (const auto& entry : log) {
        if (const auto* a = std::get_if<ApprovalEvent>(&entry))
            collector.on_approval(*a);
        else if (const auto* e = std::get_if<ExecutionEvent>(&entry))
            collector.on_execution(*e);
        // direct transfers carry no spender and stay out of behavior
    }
    return collector.take_sequences();
}

BehaviorDistribution behavior_distribution(
    const std::vector<BehaviorSequence>& seqs,
    const std::optional<BehaviorCollector::PairFilter>& requested) {
    std::map<std::pair<Address, Address>, BehaviorPairRow> rows;
    if (requested) {
        for (const auto& [spender, token] : *requested) {
            auto& row = rows[{spender, token}];
            row.spender = spender;
            row.token = token;
        }
    }
    BehaviorDistribution dist;
    for (const auto& seq : seqs) {
        const std::pair<Address, Address> key{seq.spender, seq.token};
        if (requested && !requested->contains(key)) continue;
        auto& row = rows[key];
        row.spender = seq.spender;
        row.token = seq.token;
        ++row.identical_users;  // one sequence per owner for a given pair
        if (seq.mode == BehaviorMode::Anomalous) {
            ++row.n_anomalous;
            ++dist.global_anomalous;
        } else {
            ++row.mode_counts[mode_index(seq.mode)];
            ++dist.global_counts[mode_index(seq.mode)];
        }
    }
    dist.pairs.reserve(rows.size());
    for (auto& [key, row] : rows) {
        const uint64_t denom = row.identical_users - row.n_anomalous;
        for (size_t m = 0; m < row.mode_counts.size(); ++m)
            row.mode_tenths[m] = percent_tenths(row.mode_counts[m], denom);
        dist.pairs.push_back(row);
    }
    uint64_t global_denom = 0;
    for (uint64_t c : dist.global_counts) global_denom += c;
    for (size_t m = 0; m < dist.global_counts.size(); ++m)
        dist.global_tenths[m] = percent_tenths(dist.global_counts[m], global_denom);
    return dist;
}

}  // namespace alens
