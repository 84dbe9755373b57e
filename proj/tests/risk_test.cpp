#include "doctest.h"

#include <random>

#include "alens/errors.hpp"
#include "alens/percent.hpp"
#include "alens/risk.hpp"
#include "test_util.hpp"

using namespace alens;

namespace {

Address addr(uint8_t tag) {
    Address a;
    a.bytes[19] = tag;
    a.bytes[0] = 0x30;
    return a;
}

const Address kOwner = addr(0x01);
const Address kSpender = addr(0x02);
const Address kToken = addr(0x03);

TokenState state_with(const U256& allowance_amount, const U256& balance,
                      const Address& owner = kOwner,
                      const Address& spender = kSpender) {
    TokenState tok;
    if (!balance.is_zero())
        tok.balance_of[owner] = balance;
    if (!allowance_amount.is_zero())
        tok.allowance[{owner, spender}] = allowance_amount;
    tok.approved_pairs.insert({owner, spender});
    return tok;
}

void add_pair(TokenState& tok, const Address& owner, const Address& spender,
              const U256& allowance_amount, const U256& balance) {
    if (!balance.is_zero())
        tok.balance_of[owner] = balance;
    else
        tok.balance_of.erase(owner);
    if (!allowance_amount.is_zero())
        tok.allowance[{owner, spender}] = allowance_amount;
    tok.approved_pairs.insert({owner, spender});
}

}  // namespace

TEST_CASE("exposure is the smaller of allowance and balance") {
    CHECK(risk_amount(state_with(U256(100), U256(40)), kOwner, kSpender) ==
          U256(40));
    CHECK(risk_amount(state_with(U256(0), U256(1000000)), kOwner, kSpender) ==
          U256(0));
    CHECK(risk_amount(state_with(U256::max(), U256(5567)), kOwner, kSpender) ==
          U256(5567));
    CHECK(risk_amount(state_with(U256(40), U256(100)), kOwner, kSpender) ==
          U256(40));
    CHECK(risk_amount(TokenState{}, kOwner, kSpender) == U256(0));
}

TEST_CASE("level depends only on the two signs") {
    CHECK(risk_level(state_with(U256(0), U256(50)), kOwner, kSpender) ==
          RiskLevel::NoRisk);
    CHECK(risk_level(state_with(U256(10), U256(0)), kOwner, kSpender) ==
          RiskLevel::LowRisk);
    CHECK(risk_level(state_with(U256(10), U256(3)), kOwner, kSpender) ==
          RiskLevel::HighRisk);
    CHECK(risk_level(state_with(U256(0), U256(0)), kOwner, kSpender) ==
          RiskLevel::NoRisk);
}

TEST_CASE("level and amount stay consistent") {
    std::mt19937_64 rng(83);
    for (int i = 0; i < 2000; ++i) {
        U256 allowance_amount = rng() % 3 == 0 ? U256(0) : U256(rng() % 100);
        U256 balance = rng() % 3 == 0 ? U256(0) : U256(rng() % 100);
        TokenState tok = state_with(allowance_amount, balance);
        RiskLevel level = risk_level(tok, kOwner, kSpender);
        U256 amount = risk_amount(tok, kOwner, kSpender);
        if (level == RiskLevel::HighRisk)
            CHECK(!amount.is_zero());
        else
            CHECK(amount.is_zero());
    }
}

TEST_CASE("rows cover every pair with history, revoked included") {
    TokenState tok = state_with(U256(10), U256(5));
    add_pair(tok, addr(0x11), kSpender, U256(0), U256(9));  // revoked

    auto rows = risk_rows(tok);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].owner == kOwner);
    CHECK(rows[0].amount == U256(5));
    CHECK(rows[0].level == RiskLevel::HighRisk);
    CHECK(rows[1].owner == addr(0x11));
    CHECK(rows[1].amount == U256(0));
    CHECK(rows[1].level == RiskLevel::NoRisk);
}

TEST_CASE("distribution counts each user once at their worst level") {
    LedgerState st;
    TokenState& tok = st.tokens[kToken];
    add_pair(tok, addr(0x0A), kSpender, U256(5), U256(5));  // high
    add_pair(tok, addr(0x0B), kSpender, U256(5), U256(0));  // low
    add_pair(tok, addr(0x0C), kSpender, U256(0), U256(9));  // revoked: none

    auto dist = risk_distribution(st, kToken);
    CHECK(dist.user_count == 3);
    CHECK(dist.users_no == 1);
    CHECK(dist.users_low == 1);
    CHECK(dist.users_high == 1);
    CHECK(dist.tenths_no == 333);
    CHECK(dist.tenths_low == 333);
    CHECK(dist.tenths_high == 333);
}

TEST_CASE("multi-spender users fold to the worst level") {
    LedgerState st;
    TokenState& tok = st.tokens[kToken];
    Address user = addr(0x0A);
    // Spender 1 revoked; spender 2 active with balance present.
    add_pair(tok, user, addr(0x21), U256(0), U256(2));
    add_pair(tok, user, addr(0x22), U256(7), U256(2));

    auto dist = risk_distribution(st, kToken);
    CHECK(dist.user_count == 1);
    CHECK(dist.users_high == 1);
    CHECK(dist.users_no == 0);
}

TEST_CASE("distribution edge cases") {
    LedgerState st;
    st.tokens[kToken];  // present but empty
    auto dist = risk_distribution(st, kToken);
    CHECK(dist.user_count == 0);
    CHECK(dist.tenths_no == 0);

    CHECK_THROWS_AS(risk_distribution(st, addr(0x77)), TokenAbsent);
}

TEST_CASE("percentage rendering rounds half up to one decimal") {
    CHECK(percent_tenths(1, 3) == 333);
    CHECK(percent_tenths(1, 8) == 125);
    CHECK(percent_tenths(1, 2000) == 1);   // 0.05% -> 0.1
    CHECK(percent_tenths(1, 4000) == 0);   // 0.025% -> 0.0
    CHECK(percent_tenths(0, 5) == 0);
    CHECK(percent_tenths(5, 5) == 1000);
    CHECK(percent_tenths(0, 0) == 0);
    CHECK(format_tenths(333) == "33.3");
    CHECK(format_tenths(1000) == "100.0");
    CHECK(format_tenths(1) == "0.1");
    CHECK(format_tenths(0) == "0.0");
}

TEST_CASE("series tracks sums and counts over checkpoints") {
    Snapshot cp1;
    cp1.block = 10;
    TokenState& t1 = cp1.state.tokens[kToken];
    add_pair(t1, kOwner, kSpender, U256(100), U256(40));

    Snapshot cp2;
    cp2.block = 20;
    TokenState& t2 = cp2.state.tokens[kToken];
    add_pair(t2, kOwner, kSpender, U256(60), U256(0));  // drained

    std::vector<Snapshot> snaps{cp1, cp2};

    auto sums = risk_series(snaps, kToken, SeriesMetric::SumRiskAmount);
    REQUIRE(sums.size() == 2);
    CHECK(sums[0].block == 10);
    CHECK(sums[0].metric == "sum_risk_amount");
    CHECK(sums[0].value == "40");
    CHECK(sums[1].value == "0");

    auto counts = risk_series(snaps, kToken, SeriesMetric::LevelCounts);
    REQUIRE(counts.size() == 6);
    CHECK(counts[0].metric == "users_no_risk");
    CHECK(counts[0].value == "0");
    CHECK(counts[2].metric == "users_high_risk");
    CHECK(counts[2].value == "1");
    CHECK(counts[3].block == 20);
    CHECK(counts[4].metric == "users_low_risk");
    CHECK(counts[4].value == "1");
}

TEST_CASE("series handles tokens born mid-corpus") {
    Snapshot early;
    early.block = 5;  // token not yet seen
    Snapshot late;
    late.block = 15;
    add_pair(late.state.tokens[kToken], kOwner, kSpender, U256(3), U256(9));

    std::vector<Snapshot> snaps{early, late};
    auto rows = risk_series(snaps, kToken, SeriesMetric::SumRiskAmount);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].value == "0");
    CHECK(rows[1].value == "3");

    CHECK_THROWS_AS(risk_series(snaps, addr(0x66), SeriesMetric::SumRiskAmount),
                    TokenAbsent);
}

TEST_CASE("simulated drains equal the closed form") {
    std::mt19937_64 rng(89);
    for (int i = 0; i < 500; ++i) {
        U256 allowance_amount;
        U256 balance;
        switch (rng() % 4) {
            case 0:
                allowance_amount = U256(rng() % 1000);
                balance = U256(rng() % 1000);
                break;
            case 1:
                allowance_amount = U256::max();
                balance = testutil::random_u256(rng);
                break;
            case 2:
                allowance_amount = testutil::random_u256(rng);
                balance = U256(0);
                break;
            default:
                allowance_amount = testutil::random_u256(rng);
                balance = testutil::random_u256(rng);
                break;
        }
        TokenState tok = state_with(allowance_amount, balance);
        auto loot = attacker_oracle(tok, kSpender);
        REQUIRE(loot.per_owner.size() == 1);
        CHECK(loot.per_owner[0].second == risk_amount(tok, kOwner, kSpender));
        // The oracle never mutates its input.
        CHECK(tok.balance(kOwner) == balance);
        CHECK(tok.allowance_of(kOwner, kSpender) == allowance_amount);
    }
}

TEST_CASE("drain examples") {
    auto loot = attacker_oracle(state_with(U256(60), U256(100)), kSpender);
    REQUIRE(loot.per_owner.size() == 1);
    CHECK(loot.per_owner[0].second == U256(60));

    auto loot2 = attacker_oracle(state_with(U256::max(), U256(75)), kSpender);
    CHECK(loot2.per_owner[0].second == U256(75));

    auto loot3 = attacker_oracle(TokenState{}, kSpender);
    CHECK(loot3.per_owner.empty());
    CHECK(loot3.total.is_zero());
}

TEST_CASE("drains aggregate over many owners") {
    TokenState tok;
    add_pair(tok, addr(0x0A), kSpender, U256(60), U256(100));
    add_pair(tok, addr(0x0B), kSpender, U256(100), U256(30));
    add_pair(tok, addr(0x0C), kSpender, U256(0), U256(9));
    add_pair(tok, addr(0x0D), addr(0x99), U256(5), U256(5));  // other spender

    auto loot = attacker_oracle(tok, kSpender);
    REQUIRE(loot.per_owner.size() == 3);
    CHECK(loot.per_owner[0].second == U256(60));
    CHECK(loot.per_owner[1].second == U256(30));
    CHECK(loot.per_owner[2].second == U256(0));
    CHECK(loot.total.equals(U256(90)));
}

TEST_CASE("self-approving owners still measure correctly") {
    // The spender approves themselves; loot must count even though moving
    // tokens to themselves would be a net no-op.
    TokenState tok = state_with(U256(50), U256(80), kOwner, kOwner);
    auto loot = attacker_oracle(tok, kOwner);
    REQUIRE(loot.per_owner.size() == 1);
    CHECK(loot.per_owner[0].second == U256(50));
}
