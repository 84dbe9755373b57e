#include "doctest.h"

#include <random>
#include <string>

#include "alens/u256.hpp"
#include "test_util.hpp"

using namespace alens;

namespace {
const std::string kMaxDec =
    "115792089237316195423570985008687907853269984665640564039457584007913129639935";
const std::string kPow248Dec =
    "452312848583266388373324160190187140051835877600158453279131187530910662656";
}  // namespace

TEST_CASE("decimal parse accepts canonical values") {
    CHECK(u256_from_decimal("0") == U256(0));
    CHECK(u256_from_decimal("1") == U256(1));
    CHECK(u256_from_decimal("007") == U256(7));
    CHECK(u256_from_decimal("18446744073709551616").has_value());  // 2^64
    CHECK(u256_from_decimal(kMaxDec) == U256::max());

    auto p248 = u256_from_decimal(kPow248Dec);
    REQUIRE(p248.has_value());
    U256 expect;
    expect.limbs = {0, 0, 0, 1ull << 56};
    CHECK(*p248 == expect);
}

TEST_CASE("decimal parse rejects malformed input") {
    CHECK(!u256_from_decimal(""));
    CHECK(!u256_from_decimal("-1"));
    CHECK(!u256_from_decimal("+1"));
    CHECK(!u256_from_decimal("1 "));
    CHECK(!u256_from_decimal("0x10"));
    CHECK(!u256_from_decimal("12a3"));
    // 2^256 exactly: one past the top.
    CHECK(!u256_from_decimal(
        "115792089237316195423570985008687907853269984665640564039457584007913129639936"));
    CHECK(!u256_from_decimal(std::string(100, '9')));
}

TEST_CASE("decimal render round-trips") {
    CHECK(to_decimal(U256(0)) == "0");
    CHECK(to_decimal(U256(1)) == "1");
    CHECK(to_decimal(U256::max()) == kMaxDec);
    CHECK(to_decimal(*u256_from_decimal("10000000000000000000")) ==
          "10000000000000000000");

    std::mt19937_64 rng(7);
    for (int i = 0; i < 2000; ++i) {
        U256 v = testutil::random_u256(rng);
        auto back = u256_from_decimal(to_decimal(v));
        REQUIRE(back.has_value());
        CHECK(*back == v);
    }
}

TEST_CASE("checked arithmetic") {
    CHECK(checked_add(U256(2), U256(3)) == U256(5));
    CHECK(!checked_add(U256::max(), U256(1)).has_value());
    CHECK(checked_sub(U256::max(), U256::max()) == U256(0));
    CHECK(!checked_sub(U256(0), U256(1)).has_value());

    // Carry across limbs.
    U256 low_full;
    low_full.limbs = {~0ull, 0, 0, 0};
    auto carried = checked_add(low_full, U256(1));
    REQUIRE(carried.has_value());
    U256 expect;
    expect.limbs = {0, 1, 0, 0};
    CHECK(*carried == expect);

    std::mt19937_64 rng(11);
    for (int i = 0; i < 2000; ++i) {
        U256 a = testutil::random_u256(rng);
        U256 b = testutil::random_u256(rng);
        auto sum = checked_add(a, b);
        if (sum) {
            CHECK(checked_sub(*sum, b) == a);
            CHECK(checked_sub(*sum, a) == b);
        } else {
            // Overflow iff b exceeds the headroom above a.
            CHECK(b > *checked_sub(U256::max(), a));
        }
    }
}

TEST_CASE("ordering matches numeric value") {
    CHECK(U256(1) < U256(2));
    U256 high;
    high.limbs = {0, 0, 0, 1};
    CHECK(U256(~0ull) < high);
    CHECK(min(U256(9), U256(4)) == U256(4));
    CHECK(min(high, U256(~0ull)) == U256(~0ull));

    std::mt19937_64 rng(13);
    for (int i = 0; i < 500; ++i) {
        U256 a = testutil::random_u256(rng);
        U256 b = testutil::random_u256(rng);
        // Compare via padded decimal strings as an independent order oracle.
        std::string da = to_decimal(a), db = to_decimal(b);
        std::string pa = std::string(80 - da.size(), '0') + da;
        std::string pb = std::string(80 - db.size(), '0') + db;
        CHECK((a < b) == (pa < pb));
        CHECK((a == b) == (pa == pb));
    }
}

TEST_CASE("big-endian word conversion") {
    std::array<uint8_t, 32> one{};
    one[31] = 1;
    CHECK(u256_from_be(one) == U256(1));
    CHECK(u256_to_be(U256(1)) == one);

    std::array<uint8_t, 32> top{};
    top[0] = 0x80;
    U256 half;
    half.limbs = {0, 0, 0, 1ull << 63};
    CHECK(u256_from_be(top) == half);

    std::mt19937_64 rng(17);
    for (int i = 0; i < 1000; ++i) {
        U256 v = testutil::random_u256(rng);
        CHECK(u256_from_be(u256_to_be(v)) == v);
    }
}

TEST_CASE("predicate helpers") {
    CHECK(U256(0).is_zero());
    CHECK(!U256(1).is_zero());
    CHECK(U256::max().is_max());
    CHECK(!U256(0).is_max());
    U256 almost = *checked_sub(U256::max(), U256(1));
    CHECK(!almost.is_max());
}

TEST_CASE("wide accumulator sums past 256 bits") {
    WideSum s;
    CHECK(s.is_zero());
    CHECK(s.to_decimal() == "0");
    CHECK(s.equals(U256(0)));

    s.add(U256(41));
    s.add(U256(1));
    CHECK(s.equals(U256(42)));
    CHECK(s.to_decimal() == "42");

    WideSum w;
    for (int i = 0; i < 4; ++i)
        w.add(U256::max());
    CHECK(!w.equals(U256::max()));
    CHECK(w.to_decimal() ==
          "463168356949264781694283940034751631413079938662562256157830336031652518559740");
}
