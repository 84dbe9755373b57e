#include "alens/ledger.hpp"

#include <stdexcept>

#include "alens/errors.hpp"
#include "alens/hex.hpp"

namespace alens {

namespace {

void advance_cursor(LedgerState& state, const ChainPos& pos) {
    if (state.cursor && pos < *state.cursor)
        throw OrderViolation("ledger: event at block " + std::to_string(pos.block) +
                             " index " + std::to_string(pos.index) +
                             " precedes the cursor");
    state.cursor = pos;
}

// Feasibility guarantees subtraction cannot underflow; a miss is a bug.
U256 must_sub(const U256& a, const U256& b) {
    auto r = checked_sub(a, b);
    if (!r)
        throw std::logic_error("ledger: balance underflow past feasibility check");
    return *r;
}

U256 must_add(const U256& a, const U256& b) {
    auto r = checked_add(a, b);
    if (!r)
        throw std::logic_error("ledger: balance overflow past feasibility check");
    return *r;
}

void set_balance(TokenState& tok, const Address& a, const U256& v) {
    if (v.is_zero())
        tok.balance_of.erase(a);
    else
        tok.balance_of[a] = v;
}

void set_allowance(TokenState& tok, const Address& owner, const Address& spender,
                   const U256& v) {
    if (v.is_zero())
        tok.allowance.erase({owner, spender});
    else
        tok.allowance[{owner, spender}] = v;
}

// Shared infeasibility handling. Returns the amount to apply (zero means
// nothing to do); throws in halt mode.
U256 resolve_amount(const U256& requested, const U256& cap,
                    const LedgerConfig& config, LedgerStats* stats,
                    const char* what) {
    if (requested <= cap)
        return requested;
    switch (config.on_insufficient) {
        case OnInsufficient::SkipAndCount:
            if (stats)
                ++stats->infeasible_skipped;
            return U256(0);
        case OnInsufficient::Clamp:
            if (stats)
                ++stats->clamped;
            return cap;
        case OnInsufficient::Halt:
        default:
            throw InsufficientState(std::string("ledger: ") + what +
                                    " cannot cover amount " + to_decimal(requested));
    }
}

}  // namespace

void apply_approval(LedgerState& state, const ApprovalEvent& ev) {
    advance_cursor(state, ev.pos);
    TokenState& tok = state.token(ev.token);
    set_allowance(tok, ev.owner, ev.spender, ev.amount);
    tok.approved_pairs.insert({ev.owner, ev.spender});
}

void apply_transfer_from(LedgerState& state, const ExecutionEvent& ev,
                         const LedgerConfig& config, LedgerStats* stats) {
    advance_cursor(state, ev.pos);
    const TokenState* tok = state.find_token(ev.token);
    U256 balance = tok ? tok->balance(ev.owner) : U256(0);
    U256 allowance = tok ? tok->allowance_of(ev.owner, ev.spender) : U256(0);

    U256 cap = min(balance, allowance);
    if (ev.receiver != ev.owner) {
        U256 receiver_balance = tok ? tok->balance(ev.receiver) : U256(0);
        cap = min(cap, must_sub(U256::max(), receiver_balance));
    }
    U256 amount = resolve_amount(ev.amount, cap, config, stats,
                                 "balance or allowance");
    if (amount.is_zero())
        return;

    TokenState& t = state.token(ev.token);
    set_balance(t, ev.owner, must_sub(t.balance(ev.owner), amount));
    set_balance(t, ev.receiver, must_add(t.balance(ev.receiver), amount));
    U256 remaining = t.allowance_of(ev.owner, ev.spender);
    if (!(config.infinite_allowance_no_decrement && remaining.is_max()))
        set_allowance(t, ev.owner, ev.spender, must_sub(remaining, amount));
}

void apply_transfer(LedgerState& state, const TransferEvent& ev,
                    const LedgerConfig& config, LedgerStats* stats) {
    advance_cursor(state, ev.pos);
    bool minting = ev.from == kZeroAddress;
    bool burning = ev.to == kZeroAddress;
    if (minting && burning)
        return;  // zero to zero moves nothing

    const TokenState* tok = state.find_token(ev.token);

    U256 cap = U256::max();
    if (!minting)
        cap = tok ? tok->balance(ev.from) : U256(0);
    if (!burning && ev.to != ev.from) {
        U256 receiver_balance = tok ? tok->balance(ev.to) : U256(0);
        cap = min(cap, must_sub(U256::max(), receiver_balance));
    }
    U256 amount = resolve_amount(ev.amount, cap, config, stats, "balance");
    if (amount.is_zero())
        return;

    TokenState& t = state.token(ev.token);
    if (!minting)
        set_balance(t, ev.from, must_sub(t.balance(ev.from), amount));
    if (!burning)
        set_balance(t, ev.to, must_add(t.balance(ev.to), amount));
    if (stats) {
        if (minting)
            stats->total_minted.add(amount);
        if (burning)
            stats->total_burned.add(amount);
    }
}

void apply_event(LedgerState& state, const DecodedEvent& ev,
                 const LedgerConfig& config, LedgerStats* stats) {
    if (const auto* ap = std::get_if<ApprovalEvent>(&ev))
        apply_approval(state, *ap);
    else if (const auto* ex = std::get_if<ExecutionEvent>(&ev))
        apply_transfer_from(state, *ex, config, stats);
    else
        apply_transfer(state, std::get<TransferEvent>(ev), config, stats);
}

ReplayResult replay(RecordStream& stream, const TokenRegistry& registry,
                    const DecodeConfig& decode_config,
                    const LedgerConfig& ledger_config,
                    const std::vector<uint64_t>& checkpoints, EventSink* sink) {
    for (size_t i = 1; i < checkpoints.size(); ++i)
        if (checkpoints[i] <= checkpoints[i - 1])
            throw ConfigError("checkpoints must be strictly ascending");

    Decoder decoder(&registry, decode_config);
    ReplayResult res;
    size_t next_cp = 0;

    while (auto rec = stream.next()) {
        while (next_cp < checkpoints.size() && rec->block > checkpoints[next_cp]) {
            res.snapshots.push_back({checkpoints[next_cp], res.final_state});
            ++next_cp;
        }
        for (const DecodedEvent& ev : decoder.decode(*rec)) {
            if (sink) {
                if (const auto* ap = std::get_if<ApprovalEvent>(&ev))
                    sink->on_approval(*ap);
                else if (const auto* ex = std::get_if<ExecutionEvent>(&ev))
                    sink->on_execution(*ex);
                else
                    sink->on_transfer(std::get<TransferEvent>(ev));
            }
            apply_event(res.final_state, ev, ledger_config, &res.ledger_stats);
            ++res.events_decoded;
        }
        ++res.records_processed;
    }
    while (next_cp < checkpoints.size()) {
        res.snapshots.push_back({checkpoints[next_cp], res.final_state});
        ++next_cp;
    }
    res.decode_stats = decoder.stats();
    return res;
}

std::string emit_snapshot_dump(uint64_t block, const Address& token,
                               const TokenState& st) {
    std::string out;
    out.reserve(64 + st.balance_of.size() * 80 + st.allowance.size() * 140);
    out += "{\"block\":";
    out += std::to_string(block);
    out += ",\"token\":\"";
    out += to_hex(token);
    out += "\",\"balances\":[";
    bool first = true;
    for (const auto& [addr, v] : st.balance_of) {
        if (!first)
            out += ',';
        first = false;
        out += "{\"addr\":\"";
        out += to_hex(addr);
        out += "\",\"v\":\"";
        out += to_decimal(v);
        out += "\"}";
    }
    out += "],\"allowances\":[";
    first = true;
    for (const auto& [pair, v] : st.allowance) {
        if (!first)
            out += ',';
        first = false;
        out += "{\"owner\":\"";
        out += to_hex(pair.first);
        out += "\",\"spender\":\"";
        out += to_hex(pair.second);
        out += "\",\"v\":\"";
        out += to_decimal(v);
        out += "\"}";
    }
    out += "]}";
    return out;
}

void write_snapshot_dump(std::ostream& out, uint64_t block,
                         const LedgerState& state) {
    for (const auto& [token, st] : state.tokens)
        out << emit_snapshot_dump(block, token, st) << '\n';
}

}  // namespace alens
