#include "alens/synth.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <tuple>
#include <utility>
#include <variant>

#include "alens/errors.hpp"
#include "alens/hex.hpp"
#include "alens/wire.hpp"

namespace alens {

namespace {

/// All draws go through one engine in planning order, so a seed pins the
/// whole corpus byte for byte.
class Rng {
  public:
    explicit Rng(uint64_t seed) : eng_(seed) {}

    uint64_t pick(uint64_t n) { return eng_() % n; }  // n >= 1
    uint64_t range(uint64_t lo, uint64_t hi) { return lo + pick(hi - lo + 1); }
    bool flip() { return (eng_() & 1) != 0; }

    std::array<uint8_t, 32> hash() {
        std::array<uint8_t, 32> h;
        for (size_t i = 0; i < 4; ++i) {
            const uint64_t w = eng_();
            for (size_t b = 0; b < 8; ++b)
                h[i * 8 + b] = static_cast<uint8_t>(w >> (8 * b));
        }
        return h;
    }

  private:
    std::mt19937_64 eng_;
};

constexpr uint8_t kUserRole = 0x11;
constexpr uint8_t kSpenderRole = 0x22;
constexpr uint8_t kTokenRole = 0x33;
constexpr uint8_t kNftRole = 0x44;
constexpr uint8_t kReceiverRole = 0x55;
constexpr uint8_t kAttackerRole = 0xaa;

Address role_address(uint8_t role, uint64_t index) {
    Address a;
    a.bytes[0] = role;
    for (size_t i = 0; i < 8; ++i)
        a.bytes[19 - i] = static_cast<uint8_t>(index >> (8 * i));
    return a;
}

void put_selector(std::vector<uint8_t>& out, uint32_t sel) {
    out.push_back(static_cast<uint8_t>(sel >> 24));
    out.push_back(static_cast<uint8_t>(sel >> 16));
    out.push_back(static_cast<uint8_t>(sel >> 8));
    out.push_back(static_cast<uint8_t>(sel));
}

void put_word_addr(std::vector<uint8_t>& out, const Address& a) {
    const size_t base = out.size();
    out.resize(base + 32, 0);
    std::copy(a.bytes.begin(), a.bytes.end(), out.begin() + base + 12);
}

void put_word_amount(std::vector<uint8_t>& out, const U256& v) {
    const auto be = u256_to_be(v);
    out.insert(out.end(), be.begin(), be.end());
}

std::vector<uint8_t> approve_calldata(const Address& spender, const U256& amount) {
    std::vector<uint8_t> out;
    out.reserve(68);
    put_selector(out, kApproveSelector);
    put_word_addr(out, spender);
    put_word_amount(out, amount);
    return out;
}

std::vector<uint8_t> transfer_calldata(const Address& to, const U256& amount) {
    std::vector<uint8_t> out;
    out.reserve(68);
    put_selector(out, kTransferSelector);
    put_word_addr(out, to);
    put_word_amount(out, amount);
    return out;
}

std::vector<uint8_t> transfer_from_calldata(const Address& owner,
                                            const Address& receiver,
                                            const U256& amount) {
    std::vector<uint8_t> out;
    out.reserve(100);
    put_selector(out, kTransferFromSelector);
    put_word_addr(out, owner);
    put_word_addr(out, receiver);
    put_word_amount(out, amount);
    return out;
}

constexpr std::array<uint8_t, 4> kJunkSelector{0xde, 0xad, 0xbe, 0xef};

/// One planned transaction; encoding and ground-truth accounting both read
/// from this so they can never drift apart.
struct PlannedTx {
    enum class Op : uint8_t {
        Mint,           // the zero address funds `a`
        Transfer,       // a -> b (b may be the zero address: burn)
        Approve,        // a grants b
        Exec,           // b pulls a -> c as a top-level call
        ExecNested,     // b pulls a -> c one frame below a call from c
        NftApprove,     // approve on a non-fungible token: filtered out
        NestedApprove,  // approve below the top frame: ignored
        FailedApprove,  // approve in a failed transaction: skipped
    };

    Op op = Op::Mint;
    Address token;
    Address a;
    Address b;
    Address c;
    U256 amount;
    ApprovalKind akind = ApprovalKind::Other;
    bool feasible = true;  // Exec*: whether the ledger can apply it
};

using Stream = std::vector<PlannedTx>;

PlannedTx mk_mint(const Address& token, const Address& to, uint64_t amount) {
    PlannedTx p;
    p.op = PlannedTx::Op::Mint;
    p.token = token;
    p.a = to;
    p.amount = U256{amount};
    return p;
}

PlannedTx mk_transfer(const Address& token, const Address& from, const Address& to,
                      uint64_t amount) {
    PlannedTx p;
    p.op = PlannedTx::Op::Transfer;
    p.token = token;
    p.a = from;
    p.b = to;
    p.amount = U256{amount};
    return p;
}

PlannedTx mk_approve(const Address& token, const Address& owner,
                     const Address& spender, const U256& amount,
                     ApprovalKind kind, PlannedTx::Op op = PlannedTx::Op::Approve) {
    PlannedTx p;
    p.op = op;
    p.token = token;
    p.a = owner;
    p.b = spender;
    p.amount = amount;
    p.akind = kind;
    return p;
}

PlannedTx mk_exec(const Address& token, const Address& owner, const Address& spender,
                  const Address& receiver, const U256& amount, bool feasible,
                  PlannedTx::Op op = PlannedTx::Op::Exec) {
    PlannedTx p;
    p.op = op;
    p.token = token;
    p.a = owner;
    p.b = spender;
    p.c = receiver;
    p.amount = amount;
    p.feasible = feasible;
    return p;
}

TxRecord encode_tx(const PlannedTx& p, uint64_t block, uint32_t index,
                   std::map<Address, uint64_t>& nonces, Rng& rng) {
    TxRecord rec;
    rec.block = block;
    rec.index = index;
    rec.tx_hash = rng.hash();
    rec.status =
        p.op == PlannedTx::Op::FailedApprove ? TxStatus::Fail : TxStatus::Ok;

    auto frame = [](const Address& caller, const Address& callee,
                    std::vector<uint8_t> input, uint32_t depth) {
        CallFrame f;
        f.caller = caller;
        f.callee = callee;
        f.input = std::move(input);
        f.depth = depth;
        return f;
    };

    using Op = PlannedTx::Op;
    switch (p.op) {
        case Op::Mint:
            rec.frames.push_back(
                frame(kZeroAddress, p.token, transfer_calldata(p.a, p.amount), 0));
            break;
        case Op::Transfer:
            rec.frames.push_back(
                frame(p.a, p.token, transfer_calldata(p.b, p.amount), 0));
            break;
        case Op::Approve:
        case Op::FailedApprove:
        case Op::NftApprove:
            rec.frames.push_back(
                frame(p.a, p.token, approve_calldata(p.b, p.amount), 0));
            break;
        case Op::Exec:
            rec.frames.push_back(frame(
                p.b, p.token, transfer_from_calldata(p.a, p.c, p.amount), 0));
            break;
        case Op::ExecNested:
            rec.frames.push_back(frame(
                p.c, p.b, {kJunkSelector.begin(), kJunkSelector.end()}, 0));
            rec.frames.push_back(frame(
                p.b, p.token, transfer_from_calldata(p.a, p.c, p.amount), 1));
            break;
        case Op::NestedApprove:
            rec.frames.push_back(frame(
                p.a, p.b, {kJunkSelector.begin(), kJunkSelector.end()}, 0));
            rec.frames.push_back(
                frame(p.a, p.token, approve_calldata(p.b, p.amount), 1));
            break;
    }
    rec.nonce = nonces[rec.frames.front().caller]++;
    return rec;
}

/// Expected decode output and end state, maintained with plain map
/// arithmetic as transactions are laid out.
class TruthAccumulator {
  public:
    void record(const PlannedTx& p, const ChainPos& pos,
                const std::array<uint8_t, 32>& tx) {
        using Op = PlannedTx::Op;
        switch (p.op) {
            case Op::Mint: {
                events.push_back(
                    TransferEvent{pos, tx, p.token, kZeroAddress, p.a, p.amount});
                credit(p.token, p.a, p.amount);
                break;
            }
            case Op::Transfer: {
                events.push_back(
                    TransferEvent{pos, tx, p.token, p.a, p.b, p.amount});
                if (p.a != p.b && !p.amount.is_zero()) {
                    debit(p.token, p.a, p.amount);
                    if (p.b != kZeroAddress) credit(p.token, p.b, p.amount);
                }
                break;
            }
            case Op::Approve: {
                events.push_back(ApprovalEvent{pos, tx, p.token, p.a, p.b,
                                               p.amount, p.akind});
                auto& st = state[p.token];
                st.approved_pairs.insert({p.a, p.b});
                if (p.amount.is_zero())
                    st.allowance.erase({p.a, p.b});
                else
                    st.allowance[{p.a, p.b}] = p.amount;
                break;
            }
            case Op::Exec:
            case Op::ExecNested: {
                events.push_back(ExecutionEvent{pos, tx, p.token, p.a, p.b, p.c,
                                                p.amount});
                if (p.feasible && !p.amount.is_zero()) {
                    debit(p.token, p.a, p.amount);
                    credit(p.token, p.c, p.amount);
                    auto& st = state[p.token];
                    auto it = st.allowance.find({p.a, p.b});
                    const U256 rest = checked_sub(it->second, p.amount).value();
                    if (rest.is_zero())
                        st.allowance.erase(it);
                    else
                        it->second = rest;
                }
                break;
            }
            case Op::NftApprove:
            case Op::NestedApprove:
            case Op::FailedApprove:
                break;  // decoys leave no trace
        }
    }

    std::vector<DecodedEvent> events;
    std::map<Address, TokenState> state;

  private:
    void credit(const Address& token, const Address& who, const U256& amount) {
        if (amount.is_zero()) return;
        auto& bal = state[token].balance_of[who];
        bal = checked_add(bal, amount).value();
    }

    void debit(const Address& token, const Address& who, const U256& amount) {
        auto& st = state[token];
        auto it = st.balance_of.find(who);
        const U256 rest = checked_sub(it->second, amount).value();
        if (rest.is_zero())
            st.balance_of.erase(it);
        else
            it->second = rest;
    }
};

/// Merges the per-tuple streams into one timeline, preserving each stream's
/// internal order and mixing tuples across blocks.
std::vector<PlannedTx> interleave(std::vector<Stream>& streams, Rng& rng) {
    std::vector<PlannedTx> timeline;
    size_t total = 0;
    for (const auto& s : streams) total += s.size();
    timeline.reserve(total);

    std::vector<size_t> cursor(streams.size(), 0);
    std::vector<size_t> active;
    for (size_t i = 0; i < streams.size(); ++i)
        if (!streams[i].empty()) active.push_back(i);

    while (!active.empty()) {
        const size_t k = rng.pick(active.size());
        const size_t s = active[k];
        timeline.push_back(std::move(streams[s][cursor[s]++]));
        if (cursor[s] == streams[s].size()) {
            active[k] = active.back();
            active.pop_back();
        }
    }
    return timeline;
}

struct ScriptInfo {
    Address owner;
    Address spender;
    Address token;
    uint32_t n_events = 0;  // approvals plus executions
    uint32_t n_execs = 0;
    BehaviorMode mode = BehaviorMode::OnlyApproval;
    bool good = false;
    bool mode_from_count = false;  // filler tuples: single approval, then spends
};

std::string spec_to_json(const GenSpec& s) {
    std::string j = "{";
    auto field = [&](const char* name, uint64_t v, bool first = false) {
        if (!first) j += ',';
        j += '"';
        j += name;
        j += "\":";
        j += std::to_string(v);
    };
    field("seed", s.seed, true);
    field("n_users", s.n_users);
    field("n_spenders", s.n_spenders);
    field("n_tokens", s.n_tokens);
    field("n_blocks", s.n_blocks);
    field("n_filler", s.n_filler);
    j += ",\"mix\":{";
    field("mint", s.mix.mint, true);
    field("approve_ua", s.mix.approve_ua);
    field("approve_za", s.mix.approve_za);
    field("approve_oa", s.mix.approve_oa);
    field("exec", s.mix.exec);
    field("transfer", s.mix.transfer);
    j += "},\"recipe\":{";
    field("m1_good", s.recipe.m1_good, true);
    field("m1_bad", s.recipe.m1_bad);
    field("m2_good", s.recipe.m2_good);
    field("m2_bad", s.recipe.m2_bad);
    field("m3", s.recipe.m3);
    field("m4", s.recipe.m4);
    field("m5_good", s.recipe.m5_good);
    field("m5_bad", s.recipe.m5_bad);
    field("anomalous", s.recipe.anomalous);
    j += '}';
    field("n_erc721_decoys", s.n_erc721_decoys);
    field("n_internal_approve_decoys", s.n_internal_approve_decoys);
    field("n_failed_decoys", s.n_failed_decoys);
    field("max_txs_per_block", s.max_txs_per_block);
    j += '}';
    return j;
}

class CorpusBuilder {
  public:
    explicit CorpusBuilder(const GenSpec& spec) : spec_(spec), rng_(spec.seed) {}

    SynthOutput build() {
        validate();
        build_registry();
        plant_recipes();
        plant_decoys();
        plant_filler();
        if (!flow_.empty()) streams_.push_back(std::move(flow_));

        auto timeline = interleave(streams_, rng_);
        layout(timeline);
        finalize_behaviors();

        out_.truth.seed = spec_.seed;
        out_.spec_json = spec_to_json(spec_);
        return std::move(out_);
    }

  private:
    struct Tuple {
        Address owner;
        Address spender;
        Address token;
        std::optional<U256> supply;
    };

    void validate() const {
        if (spec_.n_users == 0 || spec_.n_spenders == 0 || spec_.n_tokens == 0)
            throw InfeasibleSpec("user, spender, and token pools must be positive");
        if (spec_.n_blocks == 0 || spec_.max_txs_per_block == 0)
            throw InfeasibleSpec("block budget must be positive");
        if (spec_.n_filler > 0 && spec_.mix.total() == 0)
            throw InfeasibleSpec("event mix weights must not all be zero");
    }

    void build_registry() {
        supplies_.resize(spec_.n_tokens);
        for (uint32_t k = 0; k < spec_.n_tokens; ++k) {
            const Address addr = role_address(kTokenRole, k);
            TokenInfo info;
            info.address = addr;
            info.standard = TokenStandard::Erc20;
            if (k % 2 == 0) {
                info.total_supply =
                    checked_add(kSupplyBase, U256{k}).value();
                info.decimals = 18;
            }
            supplies_[k] = info.total_supply;
            out_.registry.emplace(addr, std::move(info));
        }
        if (spec_.n_erc721_decoys > 0) {
            TokenInfo nft;
            nft.address = nft_token_;
            nft.standard = TokenStandard::Erc721;
            out_.registry.emplace(nft_token_, nft);
        }
    }

    Tuple next_tuple() {
        const auto pool = static_cast<unsigned __int128>(spec_.n_users) *
                          spec_.n_spenders * spec_.n_tokens;
        if (tuple_counter_ >= pool)
            throw InfeasibleSpec("quota needs more tuples than the pools provide");
        const uint64_t c = tuple_counter_++;
        Tuple t;
        t.owner = role_address(kUserRole, c % spec_.n_users);
        t.spender =
            role_address(kSpenderRole, (c / spec_.n_users) % spec_.n_spenders);
        const uint32_t k = static_cast<uint32_t>(
            (c / (uint64_t{spec_.n_users} * spec_.n_spenders)) % spec_.n_tokens);
        t.token = role_address(kTokenRole, k);
        t.supply = supplies_[k];
        return t;
    }

    Address fresh_receiver() { return role_address(kReceiverRole, receiver_counter_++); }

    U256 ua_amount(const Tuple& t) {
        if (t.supply && rng_.flip()) return *t.supply;
        return U256::max();
    }

    void add_mint(size_t script, const Tuple& t, uint64_t amount) {
        stream_at(script).push_back(mk_mint(t.token, t.owner, amount));
    }

    void add_approve(size_t script, const Tuple& t, ApprovalKind kind,
                     const U256& amount) {
        stream_at(script).push_back(
            mk_approve(t.token, t.owner, t.spender, amount, kind));
        ++scripts_[script].n_events;
    }

    void add_exec(size_t script, const Tuple& t, const Address& receiver,
                  uint64_t amount, bool feasible = true) {
        stream_at(script).push_back(mk_exec(t.token, t.owner, t.spender, receiver,
                                            U256{amount}, feasible));
        ++scripts_[script].n_events;
        ++scripts_[script].n_execs;
    }

    Stream& stream_at(size_t script) { return streams_[script_stream_[script]]; }

    size_t open_scripted_stream(const Tuple& t, BehaviorMode mode, bool good) {
        ScriptInfo info;
        info.owner = t.owner;
        info.spender = t.spender;
        info.token = t.token;
        info.mode = mode;
        info.good = good;
        scripts_.push_back(info);
        streams_.emplace_back();
        script_stream_.push_back(streams_.size() - 1);
        return scripts_.size() - 1;
    }

    void plant_recipes() {
        const auto& r = spec_.recipe;
        for (uint32_t i = 0; i < r.m1_good; ++i) plant_m1_good();
        for (uint32_t i = 0; i < r.m1_bad; ++i) plant_m1_bad(i);
        for (uint32_t i = 0; i < r.m2_good; ++i) plant_m2_good();
        for (uint32_t i = 0; i < r.m2_bad; ++i) plant_m2_bad(i);
        for (uint32_t i = 0; i < r.m3; ++i) plant_m3(i);
        for (uint32_t i = 0; i < r.m4; ++i) plant_m4();
        for (uint32_t i = 0; i < r.m5_good; ++i) plant_m5_good(i);
        for (uint32_t i = 0; i < r.m5_bad; ++i) plant_m5_bad(i);
        for (uint32_t i = 0; i < r.anomalous; ++i) plant_anomalous();
    }

    void plant_m1_good() {
        const auto t = next_tuple();
        const auto s = open_scripted_stream(t, BehaviorMode::OneToOne, true);
        const uint64_t x = rng_.range(1, 1000000);
        add_mint(s, t, x);
        add_approve(s, t, ApprovalKind::Other, U256{x});
        add_exec(s, t, fresh_receiver(), x);
    }

    void plant_m1_bad(uint32_t i) {
        const auto t = next_tuple();
        const auto s = open_scripted_stream(t, BehaviorMode::OneToOne, false);
        if (i % 2 == 0) {
            const uint64_t y = rng_.range(1, 1000);
            add_mint(s, t, y);
            add_approve(s, t, ApprovalKind::Unlimited, ua_amount(t));
            add_exec(s, t, fresh_receiver(), y);
        } else {
            const uint64_t x = rng_.range(2, 1000000);
            const uint64_t y = rng_.range(1, x - 1);
            add_mint(s, t, y);
            add_approve(s, t, ApprovalKind::Other, U256{x});
            add_exec(s, t, fresh_receiver(), y);
        }
    }

    void plant_m2_good() {
        const auto t = next_tuple();
        const auto s = open_scripted_stream(t, BehaviorMode::OneToMany, true);
        const size_t n = rng_.range(2, 4);
        std::vector<uint64_t> xs(n);
        uint64_t sum = 0;
        for (auto& x : xs) {
            x = rng_.range(1, 1000);
            sum += x;
        }
        add_mint(s, t, sum);
        add_approve(s, t, ApprovalKind::Other, U256{sum});
        for (uint64_t x : xs) add_exec(s, t, fresh_receiver(), x);
    }

    void plant_m2_bad(uint32_t i) {
        const auto t = next_tuple();
        const auto s = open_scripted_stream(t, BehaviorMode::OneToMany, false);
        switch (i % 3) {
            case 0: {  // unlimited approval spent over several pulls
                const uint64_t a = rng_.range(1, 1000), b = rng_.range(1, 1000);
                add_mint(s, t, a + b);
                add_approve(s, t, ApprovalKind::Unlimited, ua_amount(t));
                add_exec(s, t, fresh_receiver(), a);
                add_exec(s, t, fresh_receiver(), b);
                break;
            }
            case 1: {  // bounded approval with a residue left behind
                const uint64_t a = rng_.range(1, 1000), b = rng_.range(1, 1000);
                const uint64_t d = rng_.range(1, 1000);
                add_mint(s, t, a + b);
                add_approve(s, t, ApprovalKind::Other, U256{a + b + d});
                add_exec(s, t, fresh_receiver(), a);
                add_exec(s, t, fresh_receiver(), b);
                break;
            }
            default: {  // second pull exceeds the remaining allowance
                const uint64_t a = rng_.range(1, 1000), d = rng_.range(1, 1000);
                const uint64_t total = a + d;
                add_mint(s, t, a);
                add_approve(s, t, ApprovalKind::Other, U256{total});
                add_exec(s, t, fresh_receiver(), a);
                add_exec(s, t, fresh_receiver(), d + rng_.range(1, 1000),
                         /*feasible=*/false);
                break;
            }
        }
    }

    void plant_m3(uint32_t i) {
        const auto t = next_tuple();
        const auto s = open_scripted_stream(t, BehaviorMode::OnlyApproval, false);
        switch (i % 4) {
            case 0:
                add_approve(s, t, ApprovalKind::Other, U256{rng_.range(1, 1000000)});
                break;
            case 1:
                add_approve(s, t, ApprovalKind::Unlimited, ua_amount(t));
                break;
            case 2:
                add_approve(s, t, ApprovalKind::Unlimited, ua_amount(t));
                add_approve(s, t, ApprovalKind::Zero, U256{});
                break;
            default:
                add_approve(s, t, ApprovalKind::Other, U256{rng_.range(1, 1000000)});
                add_approve(s, t, ApprovalKind::Other, U256{rng_.range(1, 1000000)});
                break;
        }
    }

    void plant_m4() {
        const auto t = next_tuple();
        const auto s = open_scripted_stream(t, BehaviorMode::ManyToOne, false);
        const uint64_t x1 = rng_.range(1, 1000000);
        const uint64_t x2 = rng_.range(1, 1000000);
        const uint64_t y = rng_.range(1, x2);
        add_mint(s, t, y);
        add_approve(s, t, ApprovalKind::Other, U256{x1});
        add_approve(s, t, ApprovalKind::Other, U256{x2});
        add_exec(s, t, fresh_receiver(), y);
    }

    void plant_m5_good(uint32_t i) {
        const auto t = next_tuple();
        const auto s = open_scripted_stream(t, BehaviorMode::Compound, true);
        const uint64_t a = rng_.range(1, 1000), b = rng_.range(1, 1000),
                       c = rng_.range(1, 1000);
        add_mint(s, t, a + b + c);
        if (i % 2 == 0) {
            add_approve(s, t, ApprovalKind::Unlimited, ua_amount(t));
            add_exec(s, t, fresh_receiver(), a);
            add_exec(s, t, fresh_receiver(), b);
            add_approve(s, t, ApprovalKind::Zero, U256{});
            add_approve(s, t, ApprovalKind::Other, U256{c});
            add_exec(s, t, fresh_receiver(), c);
        } else {
            add_approve(s, t, ApprovalKind::Other, U256{a + b});
            add_exec(s, t, fresh_receiver(), a);
            add_exec(s, t, fresh_receiver(), b);
            add_approve(s, t, ApprovalKind::Unlimited, ua_amount(t));
            add_exec(s, t, fresh_receiver(), c);
            add_approve(s, t, ApprovalKind::Zero, U256{});
        }
    }

    void plant_m5_bad(uint32_t i) {
        const auto t = next_tuple();
        const auto s = open_scripted_stream(t, BehaviorMode::Compound, false);
        if (i % 2 == 0) {
            // exact spend closed by a needless revocation: still undisciplined
            const uint64_t x = rng_.range(1, 1000000);
            add_mint(s, t, x);
            add_approve(s, t, ApprovalKind::Other, U256{x});
            add_exec(s, t, fresh_receiver(), x);
            add_approve(s, t, ApprovalKind::Zero, U256{});
        } else {
            // first unlimited round never closed before the next one opens
            const uint64_t a = rng_.range(1, 1000), b = rng_.range(1, 1000);
            add_mint(s, t, a + b);
            add_approve(s, t, ApprovalKind::Unlimited, ua_amount(t));
            add_exec(s, t, fresh_receiver(), a);
            add_approve(s, t, ApprovalKind::Unlimited, ua_amount(t));
            add_exec(s, t, fresh_receiver(), b);
            add_approve(s, t, ApprovalKind::Zero, U256{});
        }
    }

    void plant_anomalous() {
        const auto t = next_tuple();
        const auto s = open_scripted_stream(t, BehaviorMode::Anomalous, false);
        add_exec(s, t, fresh_receiver(), rng_.range(1, 1000), /*feasible=*/false);
    }

    void plant_decoys() {
        for (uint32_t i = 0; i < spec_.n_erc721_decoys; ++i) {
            Stream s{mk_approve(nft_token_,
                                role_address(kUserRole, rng_.pick(spec_.n_users)),
                                role_address(kSpenderRole, rng_.pick(spec_.n_spenders)),
                                U256{rng_.range(1, 1000000)}, ApprovalKind::Other,
                                PlannedTx::Op::NftApprove)};
            streams_.push_back(std::move(s));
        }
        for (uint32_t i = 0; i < spec_.n_internal_approve_decoys; ++i) {
            Stream s{mk_approve(random_token(),
                                role_address(kUserRole, rng_.pick(spec_.n_users)),
                                role_address(kSpenderRole, rng_.pick(spec_.n_spenders)),
                                U256{rng_.range(1, 1000000)}, ApprovalKind::Other,
                                PlannedTx::Op::NestedApprove)};
            streams_.push_back(std::move(s));
        }
        for (uint32_t i = 0; i < spec_.n_failed_decoys; ++i) {
            Stream s{mk_approve(random_token(),
                                role_address(kUserRole, rng_.pick(spec_.n_users)),
                                role_address(kSpenderRole, rng_.pick(spec_.n_spenders)),
                                U256::max(), ApprovalKind::Unlimited,
                                PlannedTx::Op::FailedApprove)};
            streams_.push_back(std::move(s));
        }
    }

    Address random_token() {
        return role_address(kTokenRole, rng_.pick(spec_.n_tokens));
    }

    struct FillerTuple {
        size_t script;
        Tuple tuple;
        Address receiver;
        uint64_t allowance_left;  // UINT64_MAX marks an unlimited approval
        uint64_t balance_left;
    };

    void plant_filler() {
        const uint64_t mix_total = spec_.mix.total();
        std::vector<FillerTuple> candidates;

        for (uint64_t i = 0; i < spec_.n_filler; ++i) {
            uint64_t w = rng_.pick(mix_total);
            if (w < spec_.mix.mint) {
                filler_mint();
                continue;
            }
            w -= spec_.mix.mint;
            if (w < spec_.mix.approve_ua) {
                open_filler_tuple(candidates, ApprovalKind::Unlimited);
                continue;
            }
            w -= spec_.mix.approve_ua;
            if (w < spec_.mix.approve_za) {
                open_filler_tuple(candidates, ApprovalKind::Zero);
                continue;
            }
            w -= spec_.mix.approve_za;
            if (w < spec_.mix.approve_oa) {
                open_filler_tuple(candidates, ApprovalKind::Other);
                continue;
            }
            w -= spec_.mix.approve_oa;
            if (w < spec_.mix.exec) {
                filler_exec(candidates);
                continue;
            }
            filler_transfer();
        }
    }

    // Free-pool mints and transfers share one stream so every funding mint
    // precedes the transfers it backs in any interleave.
    void filler_mint() {
        const uint32_t u = static_cast<uint32_t>(rng_.pick(spec_.n_users));
        const uint32_t k = static_cast<uint32_t>(rng_.pick(spec_.n_tokens));
        const uint64_t amt = rng_.range(1, 1000000);
        flow_.push_back(
            mk_mint(role_address(kTokenRole, k), role_address(kUserRole, u), amt));
        auto& bal = free_[{k, u}];
        if (bal == 0) funded_.push_back({k, u});
        bal += amt;
    }

    void open_filler_tuple(std::vector<FillerTuple>& candidates, ApprovalKind kind) {
        const auto t = next_tuple();
        const auto s = open_scripted_stream(t, BehaviorMode::OnlyApproval, false);
        scripts_[s].mode_from_count = true;
        FillerTuple ft{s, t, fresh_receiver(), 0, 0};
        switch (kind) {
            case ApprovalKind::Unlimited: {
                const uint64_t budget = rng_.range(1, 1000000);
                add_mint(s, t, budget);
                add_approve(s, t, ApprovalKind::Unlimited, ua_amount(t));
                ft.allowance_left = UINT64_MAX;
                ft.balance_left = budget;
                candidates.push_back(ft);
                break;
            }
            case ApprovalKind::Other: {
                const uint64_t x = rng_.range(2, 1000000);
                add_mint(s, t, x);
                add_approve(s, t, ApprovalKind::Other, U256{x});
                ft.allowance_left = x;
                ft.balance_left = x;
                candidates.push_back(ft);
                break;
            }
            case ApprovalKind::Zero:
                add_approve(s, t, ApprovalKind::Zero, U256{});
                break;  // nothing to spend; stays a pure approval tuple
        }
    }

    void filler_exec(std::vector<FillerTuple>& candidates) {
        while (!candidates.empty()) {
            const size_t k = rng_.pick(candidates.size());
            auto& ft = candidates[k];
            const bool unlimited = ft.allowance_left == UINT64_MAX;
            // keep bounded approvals strictly under-spent so filler tuples
            // never classify as good practice
            const uint64_t budget = unlimited
                                        ? ft.balance_left
                                        : std::min(ft.allowance_left - 1,
                                                   ft.balance_left);
            if (budget < 1) {
                candidates[k] = candidates.back();
                candidates.pop_back();
                continue;
            }
            const uint64_t amt = rng_.range(1, std::min<uint64_t>(budget, 1000));
            add_exec(ft.script, ft.tuple, ft.receiver, amt);
            if (!unlimited) ft.allowance_left -= amt;
            ft.balance_left -= amt;
            return;
        }
        filler_mint();  // no open allowance to spend from
    }

    void filler_transfer() {
        while (!funded_.empty()) {
            const size_t j = rng_.pick(funded_.size());
            const auto key = funded_[j];
            auto it = free_.find(key);
            if (it == free_.end() || it->second == 0) {
                funded_[j] = funded_.back();
                funded_.pop_back();
                continue;
            }
            const uint64_t amt = rng_.range(1, std::min<uint64_t>(it->second, 1000000));
            const Address token = role_address(kTokenRole, key.first);
            const Address from = role_address(kUserRole, key.second);
            it->second -= amt;

            if (++transfer_count_ % 8 == 0) {
                flow_.push_back(mk_transfer(token, from, kZeroAddress, amt));
                return;
            }
            uint32_t to_idx = static_cast<uint32_t>(rng_.pick(spec_.n_users));
            if (to_idx == key.second) to_idx = (to_idx + 1) % spec_.n_users;
            if (to_idx == key.second) {  // single-user pool: burn instead
                flow_.push_back(mk_transfer(token, from, kZeroAddress, amt));
                return;
            }
            flow_.push_back(
                mk_transfer(token, from, role_address(kUserRole, to_idx), amt));
            auto& dst = free_[{key.first, to_idx}];
            if (dst == 0) funded_.push_back({key.first, to_idx});
            dst += amt;
            return;
        }
        filler_mint();  // nobody holds free balance yet
    }

    void layout(const std::vector<PlannedTx>& timeline) {
        const uint64_t total = timeline.size();
        if (total == 0) return;
        uint64_t per_block = (total + spec_.n_blocks - 1) / spec_.n_blocks;
        if (per_block > spec_.max_txs_per_block)
            throw InfeasibleSpec("quota requires more blocks than n_blocks");

        TruthAccumulator truth;
        std::map<Address, uint64_t> nonces;
        uint64_t block = 1;
        uint32_t index = 0;
        out_.records.reserve(total);
        for (const auto& p : timeline) {
            out_.records.push_back(encode_tx(p, block, index, nonces, rng_));
            truth.record(p, ChainPos{block, index}, out_.records.back().tx_hash);
            if (++index == per_block) {
                ++block;
                index = 0;
            }
        }
        out_.truth.events = std::move(truth.events);
        out_.truth.final_state = std::move(truth.state);
    }

    void finalize_behaviors() {
        for (auto& s : scripts_) {
            if (s.mode_from_count) {
                s.mode = s.n_execs == 0 ? BehaviorMode::OnlyApproval
                         : s.n_execs == 1 ? BehaviorMode::OneToOne
                                          : BehaviorMode::OneToMany;
            }
            out_.truth.behaviors.push_back(
                {s.owner, s.spender, s.token, s.n_events, s.mode, s.good});
        }
        std::sort(out_.truth.behaviors.begin(), out_.truth.behaviors.end(),
                  [](const BehaviorTruth& a, const BehaviorTruth& b) {
                      return std::tie(a.owner, a.spender, a.token) <
                             std::tie(b.owner, b.spender, b.token);
                  });
    }

    static const U256 kSupplyBase;

    GenSpec spec_;
    Rng rng_;
    SynthOutput out_;
    std::vector<Stream> streams_;
    std::vector<ScriptInfo> scripts_;
    std::vector<size_t> script_stream_;  // scripts_ index -> streams_ index
    std::vector<std::optional<U256>> supplies_;
    Address nft_token_ = role_address(kNftRole, 0);
    uint64_t tuple_counter_ = 0;
    uint64_t receiver_counter_ = 0;
    uint64_t transfer_count_ = 0;
    Stream flow_;
    std::map<std::pair<uint32_t, uint32_t>, uint64_t> free_;  // (token, user)
    std::vector<std::pair<uint32_t, uint32_t>> funded_;
};

const U256 CorpusBuilder::kSupplyBase = []() {
    return u256_from_decimal("1000000000000000000000000").value();
}();

}  // namespace

SynthOutput generate_corpus(const GenSpec& spec) {
    return CorpusBuilder(spec).build();
}

SynthOutput scenario_attack(AttackKind kind, uint32_t n_victims, uint64_t seed) {
    if (n_victims == 0)
        throw InfeasibleSpec("attack scenario needs at least one victim");
    Rng rng(seed);
    SynthOutput out;

    const Address token = role_address(kTokenRole, 0);
    const U256 supply = u256_from_decimal("1000000000000000000000000").value();
    TokenInfo info;
    info.address = token;
    info.standard = TokenStandard::Erc20;
    info.total_supply = supply;
    info.decimals = 18;
    out.registry.emplace(token, info);

    const Address attacker = role_address(kAttackerRole, 0);
    const Address legit = role_address(kSpenderRole, 0);
    const Address spender = kind == AttackKind::Model1 ? attacker : legit;

    AttackTruth attack;
    attack.kind = kind;
    std::vector<Stream> setup, drains;
    for (uint32_t i = 0; i < n_victims; ++i) {
        const Address victim = role_address(kUserRole, i);
        VictimTruth vt;
        vt.owner = victim;
        vt.spender = spender;
        vt.token = token;
        uint64_t bal = rng.range(50, 1000000);
        switch (i % 4) {
            case 0:
                vt.kind = ApprovalKind::Unlimited;
                vt.allowance = U256::max();
                break;
            case 1:  // bounded approval above the balance: residue survives
                vt.kind = ApprovalKind::Other;
                vt.allowance = U256{bal + rng.range(1, 1000)};
                break;
            case 2:  // supply-flavored unlimited; unfunded under model 2
                vt.kind = ApprovalKind::Unlimited;
                vt.allowance = supply;
                if (kind == AttackKind::Model2) bal = 0;
                break;
            default:  // bounded approval within the balance: fully drained
                vt.kind = ApprovalKind::Other;
                vt.allowance = U256{rng.range(1, bal)};
                break;
        }
        vt.balance = U256{bal};
        vt.stolen = min(vt.allowance, vt.balance);
        attack.victims.push_back(vt);

        Stream s;
        if (bal > 0) s.push_back(mk_mint(token, victim, bal));
        s.push_back(mk_approve(token, victim, spender, vt.allowance, vt.kind));
        setup.push_back(std::move(s));

        drains.push_back({kind == AttackKind::Model1
                              ? mk_exec(token, victim, attacker, attacker,
                                        vt.stolen, true)
                              : mk_exec(token, victim, legit, attacker, vt.stolen,
                                        true, PlannedTx::Op::ExecNested)});

        out.truth.behaviors.push_back(
            {victim, spender, token, 2, BehaviorMode::OneToOne,
             vt.kind == ApprovalKind::Other && vt.stolen == vt.allowance});
    }

    const auto setup_tl = interleave(setup, rng);
    const auto drain_tl = interleave(drains, rng);

    TruthAccumulator truth;
    std::map<Address, uint64_t> nonces;
    constexpr uint32_t kPerBlock = 64;
    uint64_t block = 1;
    uint32_t index = 0;
    auto emit = [&](const PlannedTx& p) {
        out.records.push_back(encode_tx(p, block, index, nonces, rng));
        truth.record(p, ChainPos{block, index}, out.records.back().tx_hash);
        if (++index == kPerBlock) {
            ++block;
            index = 0;
        }
    };
    for (const auto& p : setup_tl) emit(p);
    if (index != 0) {
        ++block;
        index = 0;
    }
    attack.drain_start_block = block;
    for (const auto& p : drain_tl) emit(p);

    out.truth.seed = seed;
    out.truth.events = std::move(truth.events);
    out.truth.final_state = std::move(truth.state);
    out.truth.attack = std::move(attack);
    std::sort(out.truth.behaviors.begin(), out.truth.behaviors.end(),
              [](const BehaviorTruth& a, const BehaviorTruth& b) {
                  return std::tie(a.owner, a.spender, a.token) <
                         std::tie(b.owner, b.spender, b.token);
              });
    out.spec_json = std::string("{\"scenario\":\"") +
                    (kind == AttackKind::Model1 ? "model1" : "model2") +
                    "\",\"n_victims\":" + std::to_string(n_victims) +
                    ",\"seed\":" + std::to_string(seed) + "}";
    return out;
}

std::string emit_ground_truth(const SynthOutput& out) {
    std::string j;
    j.reserve(256 + out.truth.events.size() * 280);
    j += "{\"seed\":";
    j += std::to_string(out.truth.seed);
    j += ",\"spec\":";
    j += out.spec_json;

    j += ",\"events\":[";
    bool first = true;
    for (const auto& ev : out.truth.events) {
        j += first ? "\n" : ",\n";
        first = false;
        j += std::visit([](const auto& e) { return emit_event_dump(e); }, ev);
    }
    j += first ? "]" : "\n]";

    const uint64_t final_block =
        out.records.empty() ? 0 : out.records.back().block;
    j += ",\"final_state\":[";
    first = true;
    for (const auto& [token, st] : out.truth.final_state) {
        j += first ? "\n" : ",\n";
        first = false;
        j += emit_snapshot_dump(final_block, token, st);
    }
    j += first ? "]" : "\n]";

    j += ",\"behaviors\":[";
    first = true;
    for (const auto& b : out.truth.behaviors) {
        j += first ? "\n" : ",\n";
        first = false;
        j += "{\"owner\":\"" + to_hex(b.owner) + "\",\"spender\":\"" +
             to_hex(b.spender) + "\",\"token\":\"" + to_hex(b.token) +
             "\",\"n_events\":" + std::to_string(b.n_events) + ",\"mode\":\"";
        j += to_string(b.mode);
        j += "\",\"good_practice\":";
        j += b.good_practice ? "true" : "false";
        j += '}';
    }
    j += first ? "]" : "\n]";

    j += ",\"attack\":";
    if (out.truth.attack) {
        const auto& a = *out.truth.attack;
        j += "{\"kind\":\"";
        j += a.kind == AttackKind::Model1 ? "model1" : "model2";
        j += "\",\"drain_start_block\":";
        j += std::to_string(a.drain_start_block);
        j += ",\"victims\":[";
        first = true;
        for (const auto& v : a.victims) {
            j += first ? "\n" : ",\n";
            first = false;
            j += "{\"owner\":\"" + to_hex(v.owner) + "\",\"spender\":\"" +
                 to_hex(v.spender) + "\",\"token\":\"" + to_hex(v.token) +
                 "\",\"kind\":\"";
            j += to_string(v.kind);
            j += "\",\"balance\":\"" + to_decimal(v.balance) +
                 "\",\"allowance\":\"" + to_decimal(v.allowance) +
                 "\",\"stolen\":\"" + to_decimal(v.stolen) + "\"}";
        }
        j += first ? "]}" : "\n]}";
    } else {
        j += "null";
    }
    j += "}";
    return j;
}

void write_synth(const SynthOutput& out, const std::string& corpus_path,
                 const std::string& registry_path, const std::string& truth_path) {
    {
        std::ofstream f(corpus_path);
        if (!f) throw SourceUnavailable("cannot open " + corpus_path + " for writing");
        for (const auto& rec : out.records) f << emit_record(rec) << '\n';
    }
    {
        std::ofstream f(registry_path);
        if (!f)
            throw SourceUnavailable("cannot open " + registry_path + " for writing");
        for (const auto& [addr, info] : out.registry)
            f << emit_registry_line(info) << '\n';
    }
    {
        std::ofstream f(truth_path);
        if (!f) throw SourceUnavailable("cannot open " + truth_path + " for writing");
        f << emit_ground_truth(out) << '\n';
    }
}

}  // namespace alens
