#include "alens/risk.hpp"

#include "alens/errors.hpp"
#include "alens/hex.hpp"
#include "alens/percent.hpp"

namespace alens {

U256 risk_amount(const TokenState& state, const Address& owner,
                 const Address& spender) {
    return min(state.allowance_of(owner, spender), state.balance(owner));
}

RiskLevel risk_level(const TokenState& state, const Address& owner,
                     const Address& spender) {
    bool has_allowance = !state.allowance_of(owner, spender).is_zero();
    if (!has_allowance)
        return RiskLevel::NoRisk;
    return state.balance(owner).is_zero() ? RiskLevel::LowRisk : RiskLevel::HighRisk;
}

std::vector<RiskRow> risk_rows(const TokenState& state) {
    std::vector<RiskRow> rows;
    rows.reserve(state.approved_pairs.size());
    for (const auto& [owner, spender] : state.approved_pairs) {
        RiskRow row;
        row.owner = owner;
        row.spender = spender;
        row.amount = risk_amount(state, owner, spender);
        row.level = risk_level(state, owner, spender);
        rows.push_back(row);
    }
    return rows;
}

namespace {

int severity(RiskLevel l) {
    switch (l) {
        case RiskLevel::HighRisk:
            return 2;
        case RiskLevel::LowRisk:
            return 1;
        default:
            return 0;
    }
}

RiskDistribution distribution_of(const TokenState& tok) {
    RiskDistribution dist;
    // approved_pairs is sorted by owner, so one linear pass folds each
    // owner's spenders into their worst level.
    auto it = tok.approved_pairs.begin();
    while (it != tok.approved_pairs.end()) {
        const Address& owner = it->first;
        RiskLevel worst = RiskLevel::NoRisk;
        for (; it != tok.approved_pairs.end() && it->first == owner; ++it) {
            RiskLevel l = risk_level(tok, owner, it->second);
            if (severity(l) > severity(worst))
                worst = l;
        }
        ++dist.user_count;
        switch (worst) {
            case RiskLevel::NoRisk:
                ++dist.users_no;
                break;
            case RiskLevel::LowRisk:
                ++dist.users_low;
                break;
            case RiskLevel::HighRisk:
                ++dist.users_high;
                break;
        }
    }
    dist.tenths_no = percent_tenths(dist.users_no, dist.user_count);
    dist.tenths_low = percent_tenths(dist.users_low, dist.user_count);
    dist.tenths_high = percent_tenths(dist.users_high, dist.user_count);
    return dist;
}

}  // namespace

RiskDistribution risk_distribution(const LedgerState& state, const Address& token) {
    const TokenState* tok = state.find_token(token);
    if (!tok)
        throw TokenAbsent("no state for token " + to_hex(token));
    return distribution_of(*tok);
}

std::vector<SeriesRow> risk_series(const std::vector<Snapshot>& snapshots,
                                   const Address& token, SeriesMetric metric) {
    bool seen = false;
    for (const auto& snap : snapshots)
        if (snap.state.find_token(token))
            seen = true;
    if (!seen)
        throw TokenAbsent("no snapshot contains token " + to_hex(token));

    std::vector<SeriesRow> rows;
    for (const auto& snap : snapshots) {
        const TokenState* tok = snap.state.find_token(token);
        if (metric == SeriesMetric::SumRiskAmount) {
            WideSum sum;
            if (tok)
                for (const auto& [owner, spender] : tok->approved_pairs)
                    sum.add(risk_amount(*tok, owner, spender));
            rows.push_back({snap.block, "sum_risk_amount", sum.to_decimal()});
        } else {
            RiskDistribution dist =
                tok ? distribution_of(*tok) : RiskDistribution{};
            rows.push_back(
                {snap.block, "users_no_risk", std::to_string(dist.users_no)});
            rows.push_back(
                {snap.block, "users_low_risk", std::to_string(dist.users_low)});
            rows.push_back(
                {snap.block, "users_high_risk", std::to_string(dist.users_high)});
        }
    }
    return rows;
}

namespace {

// An address holding no balance, distinct from owner and spender, to
// receive simulated loot.
Address fresh_sink(const TokenState& state, const Address& owner,
                   const Address& spender) {
    Address sink;
    sink.bytes.fill(0xff);
    while (state.balance_of.contains(sink) || sink == owner || sink == spender) {
        for (int i = 19; i >= 0; --i) {
            if (sink.bytes[i]-- != 0)
                break;
        }
    }
    return sink;
}

}  // namespace

LootResult attacker_oracle(const TokenState& state, const Address& spender) {
    LootResult result;
    const LedgerConfig probe_config;  // standard semantics, skip on infeasible
    for (const auto& pair : state.approved_pairs) {
        if (pair.second != spender)
            continue;
        const Address& owner = pair.first;

        // Fresh scratch world per owner: drains must not see each other.
        LedgerState scratch;
        Address token_key;  // scratch key; the oracle is per-token already
        scratch.tokens[token_key] = state;
        Address sink = fresh_sink(state, owner, spender);

        // Probe the way an attacker would: ask for everything the owner
        // holds, then for everything approved, until nothing moves. The
        // ledger's own feasibility rules decide what goes through; no
        // entitlement arithmetic happens here.
        uint32_t step = 0;
        bool moved = true;
        while (moved) {
            moved = false;
            const TokenState& tok = scratch.tokens[token_key];
            U256 candidates[2] = {tok.balance(owner),
                                  tok.allowance_of(owner, spender)};
            for (const U256& amount : candidates) {
                if (amount.is_zero())
                    continue;
                ExecutionEvent ev;
                ev.pos = {0, step++};
                ev.token = token_key;
                ev.owner = owner;
                ev.spender = spender;
                ev.receiver = sink;
                ev.amount = amount;
                LedgerStats stats;
                apply_transfer_from(scratch, ev, probe_config, &stats);
                if (stats.infeasible_skipped == 0) {
                    moved = true;
                    break;
                }
            }
        }
        U256 stolen = scratch.tokens[token_key].balance(sink);
        result.per_owner.emplace_back(owner, stolen);
        result.total.add(stolen);
    }
    return result;
}

}  // namespace alens
