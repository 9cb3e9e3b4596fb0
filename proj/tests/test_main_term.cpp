#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <stdexcept>

#include "shiftconv/convolution.hpp"
#include "shiftconv/main_term.hpp"

using namespace shiftconv;

TEST_CASE("main coefficient pinned values") {
    CHECK(main_coefficient(1) == 8);   // 8 |2-3| sigma(1)
    CHECK(main_coefficient(2) == 8);   // 8 |4-3| sigma(1)
    CHECK(main_coefficient(4) == 40);  // 8 |8-3| sigma(1)
    CHECK(main_coefficient_compact(1) == 8);
    CHECK(main_coefficient_compact(4) == 40);  // 8 (-1 + 2 + 4)
    CHECK(main_coefficient_compact(6) == 32);  // 8 (-1 + 2 - 3 + 6)
    CHECK_THROWS_AS(main_coefficient(0), std::invalid_argument);
}

TEST_CASE("two closed forms agree") {
    for (u64 m = 1; m <= 20000; ++m)
        REQUIRE(main_coefficient(m) == main_coefficient_compact(m));
}

TEST_CASE("odd and 2 mod 4 specializations") {
    for (u64 m = 1; m <= 501; m += 2) {
        CHECK(main_coefficient(m) == Rat(8 * Int(sigma(m))));
        CHECK(main_coefficient(2 * m) == Rat(8 * Int(sigma(m))));
    }
}

TEST_CASE("main_term values") {
    CHECK(main_term(1, 1) == 8);
    CHECK(main_term(100, 4) == 1000);
    CHECK(main_term(0, 7) == 0);
    CHECK(main_term(10, 1) == 80);
    // non-integer case stays exact
    CHECK(main_term(5, 3) == rat(8 * 4 * 5, 3));

    const auto mt = main_term_value(100, 4);
    CHECK(mt.coefficient == 40);
    CHECK(mt.value == 1000);
    CHECK(mt.value == mt.coefficient * rat(static_cast<long>(mt.x)) / rat(static_cast<long>(mt.m)));
}

TEST_CASE("error record is lossless") {
    const auto rec = error_term(10, 1, 96);
    CHECK(rec.main == 80);
    CHECK(rec.e_value == 16);
    CHECK(rec.e_value + rec.main == Rat(rec.s_value));

    const auto zero = error_term(0, 3, 0);
    CHECK(zero.e_value == 0);

    const auto table = r2_table(1, 1100);
    for (u64 m : {1, 2, 5, 12})
        for (u64 x : {17, 100, 999}) {
            const auto r = error_term(x, m, shifted_sum(x, m, table));
            REQUIRE(r.e_value + r.main == Rat(r.s_value));
        }
}

TEST_CASE("spectral coefficients") {
    const auto psl = spectral_main_coefficient(SpectralGroup::PSL2Z, 1);
    CHECK(psl.value == 24);
    CHECK(psl.pi_power == 0);
    CHECK(spectral_main_coefficient(SpectralGroup::GAMMA0_2, 3).value == 32);
    // for odd m the level-2 constant is the main-term coefficient
    for (u64 m = 1; m <= 999; m += 2)
        REQUIRE(spectral_main_coefficient(SpectralGroup::GAMMA0_2, m).value ==
                main_coefficient(m));
    CHECK(spectral_main_coefficient(SpectralGroup::PSL2Z, 6).value == Rat(24 * 12));
}

TEST_CASE("even-m coefficient rewrites") {
    CHECK(sigma(2) - 2 == 1);
    CHECK(sigma(8) - 2 == 13);
    CHECK(even_m_consistency(10000));
    CHECK_THROWS_AS(even_m_consistency(1), std::invalid_argument);
}
