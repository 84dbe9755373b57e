#include "doctest.h"

#include <random>
#include <vector>

#include "alens/decode.hpp"
#include "test_util.hpp"

using namespace alens;

namespace {

// Hand-assembled calldata: explicit byte layout, independent of any encoder
// in the library.
std::array<uint8_t, 32> addr_word(const Address& a) {
    std::array<uint8_t, 32> w{};
    std::copy(a.bytes.begin(), a.bytes.end(), w.begin() + 12);
    return w;
}

std::vector<uint8_t> calldata(uint32_t selector,
                              const std::vector<std::array<uint8_t, 32>>& words) {
    std::vector<uint8_t> out;
    out.push_back((uint8_t)(selector >> 24));
    out.push_back((uint8_t)(selector >> 16));
    out.push_back((uint8_t)(selector >> 8));
    out.push_back((uint8_t)selector);
    for (const auto& w : words)
        out.insert(out.end(), w.begin(), w.end());
    return out;
}

Address addr(uint8_t tag) {
    Address a;
    a.bytes.fill(0);
    a.bytes[19] = tag;
    a.bytes[0] = 0x10;
    return a;
}

const Address kUser = addr(0x01);
const Address kSpender = addr(0x02);
const Address kToken = addr(0x03);
const Address kReceiver = addr(0x04);
const Address kDapp = addr(0x05);

TxRecord record_with_frames(std::vector<CallFrame> frames) {
    TxRecord rec;
    rec.tx_hash.fill(0xcd);
    rec.block = 100;
    rec.index = 3;
    rec.nonce = 9;
    rec.status = TxStatus::Ok;
    rec.frames = std::move(frames);
    return rec;
}

CallFrame frame(const Address& caller, const Address& callee,
                std::vector<uint8_t> input, uint32_t depth) {
    CallFrame f;
    f.caller = caller;
    f.callee = callee;
    f.input = std::move(input);
    f.depth = depth;
    return f;
}

TokenRegistry registry_with(TokenStandard standard,
                            std::optional<U256> supply = std::nullopt) {
    TokenRegistry reg;
    TokenInfo info;
    info.address = kToken;
    info.standard = standard;
    info.total_supply = supply;
    reg.emplace(kToken, info);
    return reg;
}

}  // namespace

TEST_CASE("amount classification") {
    UaConfig strict;
    UaConfig threshold;
    threshold.mode = UnlimitedMode::Threshold;

    CHECK(classify_approval(U256(0), std::nullopt, strict) == ApprovalKind::Zero);
    CHECK(classify_approval(U256::max(), std::nullopt, strict) ==
          ApprovalKind::Unlimited);
    CHECK(classify_approval(U256(500), std::nullopt, strict) == ApprovalKind::Other);
    CHECK(classify_approval(U256(1000), U256(1000), strict) ==
          ApprovalKind::Unlimited);
    CHECK(classify_approval(U256(999), U256(1000), strict) == ApprovalKind::Other);

    // 2^249: above the default threshold, below max.
    U256 big;
    big.limbs = {0, 0, 0, 1ull << 57};
    CHECK(classify_approval(big, std::nullopt, strict) == ApprovalKind::Other);
    CHECK(classify_approval(big, std::nullopt, threshold) ==
          ApprovalKind::Unlimited);
    // Exactly 2^248 is included by >=.
    CHECK(classify_approval(default_unlimited_threshold(), std::nullopt, threshold) ==
          ApprovalKind::Unlimited);
    U256 under = *checked_sub(default_unlimited_threshold(), U256(1));
    CHECK(classify_approval(under, std::nullopt, threshold) == ApprovalKind::Other);
}

TEST_CASE("classification is a partition and strict implies threshold") {
    UaConfig strict;
    UaConfig threshold;
    threshold.mode = UnlimitedMode::Threshold;

    std::mt19937_64 rng(51);
    for (int i = 0; i < 3000; ++i) {
        U256 amount;
        switch (rng() % 4) {
            case 0:
                amount = testutil::random_u256(rng);
                break;
            case 1:
                amount = U256(rng() % 3);
                break;
            case 2:
                amount = U256::max();
                break;
            default:
                amount = default_unlimited_threshold();
                if (rng() % 2)
                    amount = *checked_sub(amount, U256(rng() % 2));
                break;
        }
        std::optional<U256> supply;
        if (rng() % 2)
            supply = U256(rng() % 2000);

        ApprovalKind s = classify_approval(amount, supply, strict);
        ApprovalKind t = classify_approval(amount, supply, threshold);
        CHECK((s == ApprovalKind::Zero) == amount.is_zero());
        CHECK((t == ApprovalKind::Zero) == amount.is_zero());
        if (s == ApprovalKind::Unlimited)
            CHECK(t == ApprovalKind::Unlimited);
    }
}

TEST_CASE("external approve decodes") {
    auto input = calldata(kApproveSelector, {addr_word(kSpender),
                                             u256_to_be(U256(500))});
    auto rec = record_with_frames({frame(kUser, kToken, input, 0)});
    auto reg = registry_with(TokenStandard::Erc20);

    DecodeStats stats;
    auto ev = decode_approve(rec, reg, UaConfig{}, &stats);
    REQUIRE(ev.has_value());
    CHECK(ev->owner == kUser);
    CHECK(ev->spender == kSpender);
    CHECK(ev->token == kToken);
    CHECK(ev->amount == U256(500));
    CHECK(ev->kind == ApprovalKind::Other);
    CHECK(ev->pos == ChainPos{100, 3});
    CHECK(ev->tx_hash == rec.tx_hash);
    CHECK(stats == DecodeStats{});
}

TEST_CASE("approve to an erc721 token is dropped") {
    auto input = calldata(kApproveSelector, {addr_word(kSpender),
                                             u256_to_be(U256(500))});
    auto rec = record_with_frames({frame(kUser, kToken, input, 0)});
    auto reg = registry_with(TokenStandard::Erc721);

    DecodeStats stats;
    CHECK(!decode_approve(rec, reg, UaConfig{}, &stats).has_value());
    CHECK(stats.erc721_filtered == 1);
}

TEST_CASE("internal approve is counted, not decoded") {
    auto input = calldata(kApproveSelector, {addr_word(kSpender),
                                             u256_to_be(U256(500))});
    auto rec = record_with_frames({frame(kUser, kDapp, {}, 0),
                                   frame(kDapp, kToken, input, 1)});
    auto reg = registry_with(TokenStandard::Erc20);

    DecodeStats stats;
    CHECK(!decode_approve(rec, reg, UaConfig{}, &stats).has_value());
    CHECK(stats.internal_approvals == 1);
    CHECK(stats.malformed_calldata == 0);
}

TEST_CASE("truncated approve arguments are malformed") {
    auto input = calldata(kApproveSelector, {addr_word(kSpender)});
    input.resize(40);  // one word missing most of its bytes
    auto rec = record_with_frames({frame(kUser, kToken, input, 0)});
    auto reg = registry_with(TokenStandard::Erc20);

    DecodeStats stats;
    CHECK(!decode_approve(rec, reg, UaConfig{}, &stats).has_value());
    CHECK(stats.malformed_calldata == 1);
}

TEST_CASE("unregistered token still decodes approvals") {
    auto input = calldata(kApproveSelector, {addr_word(kSpender),
                                             u256_to_be(U256::max())});
    auto rec = record_with_frames({frame(kUser, kToken, input, 0)});
    TokenRegistry empty;
    auto ev = decode_approve(rec, empty, UaConfig{});
    REQUIRE(ev.has_value());
    CHECK(ev->kind == ApprovalKind::Unlimited);
}

TEST_CASE("supply-equal approve classifies as unlimited while decoding") {
    auto input = calldata(kApproveSelector, {addr_word(kSpender),
                                             u256_to_be(U256(1000))});
    auto rec = record_with_frames({frame(kUser, kToken, input, 0)});
    auto reg = registry_with(TokenStandard::Erc20, U256(1000));
    auto ev = decode_approve(rec, reg, UaConfig{});
    REQUIRE(ev.has_value());
    CHECK(ev->kind == ApprovalKind::Unlimited);
}

TEST_CASE("delegated transfers decode at any depth with caller as spender") {
    auto tf = calldata(kTransferFromSelector,
                       {addr_word(kUser), addr_word(kReceiver),
                        u256_to_be(U256(40))});
    auto rec = record_with_frames({frame(kUser, kDapp, {}, 0),
                                   frame(kDapp, kToken, tf, 1)});
    auto events = decode_execution(rec);
    REQUIRE(events.size() == 1);
    CHECK(events[0].owner == kUser);
    CHECK(events[0].spender == kDapp);
    CHECK(events[0].receiver == kReceiver);
    CHECK(events[0].token == kToken);
    CHECK(events[0].amount == U256(40));
}

TEST_CASE("multiple delegated transfers keep frame order") {
    auto tf1 = calldata(kTransferFromSelector,
                        {addr_word(kUser), addr_word(kReceiver),
                         u256_to_be(U256(1))});
    auto tf2 = calldata(kTransferFromSelector,
                        {addr_word(kUser), addr_word(kReceiver),
                         u256_to_be(U256(2))});
    auto rec = record_with_frames({frame(kUser, kDapp, {}, 0),
                                   frame(kDapp, kToken, tf1, 1),
                                   frame(kDapp, kToken, tf2, 2)});
    auto events = decode_execution(rec);
    REQUIRE(events.size() == 2);
    CHECK(events[0].amount == U256(1));
    CHECK(events[1].amount == U256(2));
}

TEST_CASE("depth-0 delegated transfer decodes") {
    auto tf = calldata(kTransferFromSelector,
                       {addr_word(kUser), addr_word(kReceiver),
                        u256_to_be(U256(7))});
    auto rec = record_with_frames({frame(kSpender, kToken, tf, 0)});
    auto events = decode_execution(rec);
    REQUIRE(events.size() == 1);
    CHECK(events[0].spender == kSpender);
}

TEST_CASE("direct transfers decode at depth 0 and deep inside calls") {
    auto t0 = calldata(kTransferSelector, {addr_word(kReceiver),
                                           u256_to_be(U256(7))});
    auto rec0 = record_with_frames({frame(kUser, kToken, t0, 0)});
    auto ev0 = decode_transfer(rec0);
    REQUIRE(ev0.size() == 1);
    CHECK(ev0[0].from == kUser);
    CHECK(ev0[0].to == kReceiver);
    CHECK(ev0[0].amount == U256(7));

    auto rec3 = record_with_frames({frame(kUser, kDapp, {}, 0),
                                    frame(kDapp, kToken, t0, 3)});
    CHECK(decode_transfer(rec3).size() == 1);

    auto empty = record_with_frames({frame(kUser, kDapp, {}, 0)});
    CHECK(decode_transfer(empty).empty());
    CHECK(decode_execution(empty).empty());
}

TEST_CASE("excess calldata and dirty address padding are tolerated") {
    auto input = calldata(kApproveSelector, {addr_word(kSpender),
                                             u256_to_be(U256(5))});
    input.push_back(0xde);  // appended junk
    input.push_back(0xad);
    // Scribble over the address word's padding bytes.
    input[4] = 0xff;
    input[5] = 0xee;
    auto rec = record_with_frames({frame(kUser, kToken, input, 0)});
    TokenRegistry empty;
    auto ev = decode_approve(rec, empty, UaConfig{});
    REQUIRE(ev.has_value());
    CHECK(ev->spender == kSpender);
    CHECK(ev->amount == U256(5));
}

TEST_CASE("short inputs yield no selector") {
    auto rec = record_with_frames({frame(kUser, kToken, {0x09, 0x5e, 0xa7}, 0)});
    CHECK(!frame_selector(rec.frames[0]).has_value());
    TokenRegistry empty;
    DecodeStats stats;
    CHECK(!decode_approve(rec, empty, UaConfig{}, &stats).has_value());
    CHECK(stats == DecodeStats{});
}

TEST_CASE("decoder walks frames in order across event types") {
    auto tf = calldata(kTransferFromSelector,
                       {addr_word(kUser), addr_word(kReceiver),
                        u256_to_be(U256(40))});
    auto tr = calldata(kTransferSelector, {addr_word(kReceiver),
                                           u256_to_be(U256(41))});
    auto rec = record_with_frames({frame(kUser, kDapp, {}, 0),
                                   frame(kDapp, kToken, tf, 1),
                                   frame(kDapp, kToken, tr, 1)});
    TokenRegistry reg = registry_with(TokenStandard::Erc20);
    Decoder decoder(&reg);
    auto events = decoder.decode(rec);
    REQUIRE(events.size() == 2);
    CHECK(std::holds_alternative<ExecutionEvent>(events[0]));
    CHECK(std::holds_alternative<TransferEvent>(events[1]));
}

TEST_CASE("decoder skips failed transactions unless asked") {
    auto input = calldata(kApproveSelector, {addr_word(kSpender),
                                             u256_to_be(U256(500))});
    auto rec = record_with_frames({frame(kUser, kToken, input, 0)});
    rec.status = TxStatus::Fail;
    TokenRegistry reg = registry_with(TokenStandard::Erc20);

    Decoder skipping(&reg);
    CHECK(skipping.decode(rec).empty());
    CHECK(skipping.stats().failed_skipped == 1);

    DecodeConfig forensic;
    forensic.include_failed = true;
    Decoder keeping(&reg, forensic);
    CHECK(keeping.decode(rec).size() == 1);
    CHECK(keeping.stats().failed_skipped == 0);
}

TEST_CASE("decoder counts internal approvals once per frame") {
    auto input = calldata(kApproveSelector, {addr_word(kSpender),
                                             u256_to_be(U256(500))});
    auto rec = record_with_frames({frame(kUser, kDapp, {}, 0),
                                   frame(kDapp, kToken, input, 1),
                                   frame(kDapp, kToken, input, 2)});
    TokenRegistry reg = registry_with(TokenStandard::Erc20);
    Decoder decoder(&reg);
    CHECK(decoder.decode(rec).empty());
    CHECK(decoder.stats().internal_approvals == 2);
}
