#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "shiftconv/exponent_calculus.hpp"

using namespace shiftconv;

namespace {

// plain pointwise evaluation of a bound tree at x-exponents (t, s); sums are
// folded as max, matching the skeleton semantics the engine uses
Rat eval_expr(const BoundExpr& e, const Rat& t, const Rat& s) {
    if (e.kind == ExprKind::MONO) {
        REQUIRE(e.leaf.em == 0);
        return Rat(e.leaf.ex + e.leaf.et * t + e.leaf.ed * s);
    }
    Rat acc = eval_expr(e.children[0], t, s);
    for (std::size_t i = 1; i < e.children.size(); ++i) {
        Rat v = eval_expr(e.children[i], t, s);
        if (e.kind == ExprKind::MIN ? v < acc : v > acc) acc = v;
    }
    return acc;
}

// the four-case error exponent, written out independently of the engine
Rat expected_beta(const Rat& theta, const Rat& mu) {
    if (mu < Rat(2) / (3 + 6 * theta)) return rat(2, 3);
    if (mu < Rat(2) / (3 - 2 * theta)) return Rat((1 + 2 * theta) * mu / 4 + rat(1, 2));
    if (mu <= 1) return Rat(2 * theta * mu / 3 + rat(2, 3));
    return Rat((1 + 2 * theta) * mu / 3 + rat(1, 3));
}

bool has_candidate(const std::vector<TCandidate>& cs, const Rat& p, const Rat& q) {
    for (const auto& c : cs)
        if (c.p == p && c.q == q) return true;
    return false;
}

const Rat kTheta764 = rat(7, 64);

}  // namespace

TEST_CASE("expression builders and leaves") {
    BoundExpr e = expr_sum({mono(Rat(1), Rat(0), Rat(0), Rat(1)),
                            expr_min({mono(rat(1, 2)), mono(Rat(0), rat(1, 2), Rat(-1))})});
    auto ls = expr_leaves(e);
    CHECK(ls.size() == 3);
    CHECK(ls[0].ed == 1);
    CHECK(ls[2].et == -1);

    CHECK_THROWS_AS(expr_min({mono(Rat(1))}), std::invalid_argument);
    CHECK_THROWS_AS(expr_max({}), std::invalid_argument);

    BoundExpr scaled = expr_scale(e, Monomial{rat(1, 4), rat(1, 4), rat(1, 2), Rat(0)});
    auto sls = expr_leaves(scaled);
    CHECK(sls[0].ex == rat(5, 4));
    CHECK(sls[0].et == rat(1, 2));
    CHECK(sls[1].em == rat(1, 4));
}

TEST_CASE("substitute_mu folds m into x") {
    BoundExpr F = error_bound_small_shift(kTheta764);
    BoundExpr e = substitute_mu(F, rat(1, 2));
    for (const Monomial& l : expr_leaves(e)) CHECK(l.em == 0);
    // the m^{1/2} T^{-1} leaf of the untruncated branch: x^{1/2 + mu/2} T^{-1/2}
    bool found = false;
    for (const Monomial& l : expr_leaves(e))
        if (l.ex == rat(3, 4) && l.et == rat(-1, 2) && l.ed == 0) found = true;
    CHECK(found);
    CHECK_THROWS_AS(substitute_mu(F, Rat(-1)), std::invalid_argument);
}

TEST_CASE("piecewise evaluation and continuity") {
    PiecewiseLinear pl;
    pl.breaks = {Rat(0), Rat(1), Rat(2)};
    pl.pieces = {{Rat(0), Rat(1)}, {Rat(1), Rat(0)}};
    CHECK(pl.eval(rat(1, 2)) == rat(1, 2));
    CHECK(pl.eval(Rat(1)) == 1);
    CHECK(pl.eval(Rat(2)) == 1);
    CHECK(pl.continuous());
    CHECK_THROWS_AS(pl.eval(Rat(3)), std::out_of_range);
    CHECK_THROWS_AS(pl.eval(Rat(-1)), std::out_of_range);
    pl.pieces[1].intercept = 2;
    CHECK_FALSE(pl.continuous());
}

TEST_CASE("sup_T of a single truncated kernel") {
    // T^{1/2} min(1, (T Delta)^{-3/2}): sup over T is Delta^{-1/2}, attained
    // on the balance line t = -s
    BoundExpr e = expr_min({mono(Rat(0), Rat(0), rat(1, 2)),
                            mono(Rat(0), Rat(0), Rat(-1), rat(-3, 2))});
    auto sup = sup_T(e);
    CHECK(has_candidate(sup.candidates, Rat(0), Rat(-1)));
    CHECK(has_candidate(sup.candidates, Rat(0), Rat(0)));
    CHECK_FALSE(sup.has_limit_branch);  // growth min(1/2, -1) < 0

    auto pl = sup_T_pl(e, Rat(-2), Rat(0));
    CHECK(pl.eval(Rat(-1)) == rat(1, 2));
    CHECK(pl.eval(Rat(-2)) == Rat(1));
    CHECK(pl.eval(Rat(0)) == Rat(0));
}

TEST_CASE("sup_T rejects divergent and unsubstituted input") {
    CHECK_THROWS_AS(sup_T(mono(Rat(0), Rat(0), Rat(1))), std::domain_error);
    CHECK_THROWS_AS(sup_T(mono(Rat(0), rat(1, 2))), std::invalid_argument);
    CHECK_THROWS_AS(sup_T_pl(mono(Rat(0), Rat(0), Rat(1)), Rat(-1), Rat(0)),
                    std::domain_error);
}

TEST_CASE("sup_T keeps the T -> infinity branch when growth is zero") {
    BoundExpr F = substitute_mu(error_bound_small_shift(kTheta764), rat(1, 2));
    auto sup = sup_T(F);
    CHECK(sup.has_limit_branch);  // the volume term x Delta survives the limit
    // candidate t-values named in the analysis: T = Delta^{-1}, m^{1/2-theta}, m^{1/2}
    CHECK(has_candidate(sup.candidates, Rat(0), Rat(-1)));
    CHECK(has_candidate(sup.candidates, rat(25, 128), Rat(0)));  // (1/2 - 7/64) * 1/2
    CHECK(has_candidate(sup.candidates, rat(1, 4), Rat(0)));     // mu/2
}

TEST_CASE("inf_Delta: optimum values and witnesses") {
    DeltaRange below_one;
    below_one.s_hi = Rat(0);

    // sharp V at Delta = x^{-1/3}
    auto r1 = inf_Delta(sup_T(substitute_mu(error_bound_small_shift(kTheta764), rat(1, 2))),
                        below_one);
    CHECK(r1.value == rat(2, 3));
    CHECK(r1.delta_exponent == rat(-1, 3));

    // flat bottom; the witness is its right edge, where the volume term x Delta
    // climbs back through the optimum
    auto r2 = inf_Delta(sup_T(substitute_mu(error_bound_small_shift(kTheta764), rat(3, 5))),
                        below_one);
    CHECK(r2.value == rat(437, 640));
    CHECK(r2.delta_exponent == rat(-203, 640));

    auto r3 = inf_Delta(sup_T(substitute_mu(error_bound_small_shift(kTheta764), rat(9, 10))),
                        below_one);
    CHECK(r3.value == rat(703, 960));
    CHECK(r3.delta_exponent == rat(-257, 960));

    DeltaRange large;  // Delta < (x/m)^{1/2} at mu = 5/4
    large.s_hi = rat(-1, 8);
    auto r4 = inf_Delta(sup_T(substitute_mu(error_bound_large_shift(kTheta764), rat(5, 4))),
                        large);
    CHECK(r4.value == rat(323, 384));
    CHECK(r4.delta_exponent == rat(-109, 384));
}

TEST_CASE("inf_Delta: infeasible and unbounded ranges") {
    auto sup = sup_T(mono(Rat(1), Rat(0), Rat(0), Rat(1)));  // x Delta alone
    DeltaRange r;
    r.s_hi = Rat(0);
    CHECK_THROWS_AS(inf_Delta(sup, r), std::domain_error);  // runs away as Delta -> 0

    DeltaRange empty;
    empty.bounded_below = true;
    empty.s_lo = Rat(1);
    empty.s_hi = Rat(0);
    CHECK_THROWS_AS(inf_Delta(sup_T(substitute_mu(error_bound_small_shift(kTheta764), Rat(1))),
                              empty),
                    std::domain_error);

    DeltaRange point;  // degenerate but feasible: evaluate at the single point
    point.bounded_below = true;
    point.s_lo = rat(-1, 3);
    point.s_hi = rat(-1, 3);
    auto rp = inf_Delta(sup_T(substitute_mu(error_bound_small_shift(kTheta764), rat(1, 2))),
                        point);
    CHECK(rp.value == rat(2, 3));
}

TEST_CASE("optimizer matches the four-case exponent") {
    const std::vector<Rat> thetas = {Rat(0), kTheta764, rat(5, 48), rat(1, 9), rat(1, 20)};
    for (const Rat& th : thetas) {
        ExponentParams params(th);
        const Rat upper = uniformity_threshold(params);
        for (int k = 0; k <= 24; ++k) {
            const Rat mu = Rat(upper * k / 24);
            CHECK(optimized_error_exponent(params, mu) == expected_beta(th, mu));
        }
        // probe just around the case boundaries as well
        for (const Rat& b : {Rat(2 / (3 + 6 * th)), Rat(2 / (3 - 2 * th)), Rat(1)}) {
            for (const Rat& mu : {Rat(b - rat(1, 97)), b, Rat(b + rat(1, 97))}) {
                if (mu < 0 || mu > upper) continue;
                CHECK(optimized_error_exponent(params, mu) == expected_beta(th, mu));
            }
        }
    }
}

TEST_CASE("four-case table at the spectral-gap record") {
    auto pl = base_exponent_bound(ExponentParams(kTheta764));
    REQUIRE(pl.pieces.size() == 4);
    CHECK(pl.breaks == std::vector<Rat>{Rat(0), rat(64, 117), rat(64, 89), Rat(1), rat(64, 39)});
    CHECK(pl.pieces[0] == PiecewiseLinear::Piece{rat(2, 3), Rat(0)});
    CHECK(pl.pieces[1] == PiecewiseLinear::Piece{rat(1, 2), rat(39, 128)});
    CHECK(pl.pieces[2] == PiecewiseLinear::Piece{rat(2, 3), rat(7, 96)});
    CHECK(pl.pieces[3] == PiecewiseLinear::Piece{rat(1, 3), rat(13, 32)});
    CHECK(pl.continuous());
    CHECK(pl.eval(Rat(1)) == rat(71, 96));
}

TEST_CASE("four-case table collapses at theta = 0") {
    auto pl = base_exponent_bound(ExponentParams(Rat(0)));
    REQUIRE(pl.pieces.size() == 2);
    CHECK(pl.breaks == std::vector<Rat>{Rat(0), Rat(1), Rat(2)});
    CHECK(pl.pieces[0] == PiecewiseLinear::Piece{rat(2, 3), Rat(0)});
    CHECK(pl.pieces[1] == PiecewiseLinear::Piece{rat(1, 3), rat(1, 3)});
}

TEST_CASE("four-case exponent is monotone in theta") {
    std::vector<PiecewiseLinear> tables;
    std::vector<Rat> thetas;
    for (int k = 0; k <= 20; k += 4) {  // 0 to 7/64 in five steps
        thetas.push_back(Rat(kTheta764 * k / 20));
        tables.push_back(base_exponent_bound(ExponentParams(thetas.back())));
    }
    for (std::size_t i = 1; i < tables.size(); ++i) {
        const Rat hi = tables[i].hi();  // smaller domain at larger theta
        for (int k = 0; k <= 16; ++k) {
            const Rat mu = Rat(hi * k / 16);
            CHECK(tables[i - 1].eval(mu) <= tables[i].eval(mu));
        }
    }
}

TEST_CASE("refined window bound") {
    auto wb = window_exponent_bound(ExponentParams(kTheta764));
    CHECK(wb.mu_lo == rat(160, 161));
    CHECK(wb.mu_hi == rat(112, 99));
    REQUIRE(wb.pl.pieces.size() == 3);
    CHECK(wb.pl.breaks ==
          std::vector<Rat>{rat(160, 161), Rat(1), rat(1232, 1137), rat(112, 99)});
    CHECK(wb.pl.pieces[0] == PiecewiseLinear::Piece{rat(17, 23), Rat(0)});
    CHECK(wb.pl.pieces[1] == PiecewiseLinear::Piece{rat(17, 46), rat(17, 46)});
    CHECK(wb.pl.pieces[2] == PiecewiseLinear::Piece{rat(1, 4), rat(215, 448)});

    // another admissible eigenvalue exponent: window stays nonempty
    auto wb2 = window_exponent_bound(ExponentParams(rat(17, 160)));
    CHECK(wb2.mu_lo == rat(200, 191));
    CHECK(wb2.mu_hi == rat(280, 253));
    CHECK(wb2.mu_lo < wb2.mu_hi);

    CHECK_THROWS_WITH_AS(window_exponent_bound(ExponentParams(rat(5, 48))),
                         "improvement not applicable", std::domain_error);
    CHECK_THROWS_WITH_AS(window_exponent_bound(ExponentParams(rat(1, 10))),
                         "improvement not applicable", std::domain_error);
    CHECK_THROWS_WITH_AS(window_exponent_bound(ExponentParams(rat(1, 8))),
                         "improvement not applicable", std::domain_error);
}

TEST_CASE("combined bound: seven pieces and the advertised gains") {
    ExponentParams params(kTheta764);
    auto main = base_exponent_bound(params);
    auto cb = combined_bound(params);
    REQUIRE(cb.pieces.size() == 7);
    CHECK(cb.breaks == std::vector<Rat>{Rat(0), rat(64, 117), rat(64, 89), rat(160, 161),
                                        Rat(1), rat(1232, 1137), rat(112, 99), rat(64, 39)});
    CHECK(cb.pieces[2] == PiecewiseLinear::Piece{rat(2, 3), rat(7, 96)});
    CHECK(cb.pieces[3] == PiecewiseLinear::Piece{rat(17, 23), Rat(0)});
    CHECK(cb.pieces[4] == PiecewiseLinear::Piece{rat(17, 46), rat(17, 46)});
    CHECK(cb.pieces[5] == PiecewiseLinear::Piece{rat(1, 4), rat(215, 448)});
    CHECK(cb.pieces[6] == PiecewiseLinear::Piece{rat(1, 3), rat(13, 32)});
    CHECK(cb.continuous());

    CHECK(Rat(main.eval(rat(1232, 1137)) - cb.eval(rat(1232, 1137))) == rat(4, 1137));
    CHECK(main.eval(rat(1232, 1137)) == rat(1759, 2274));
    CHECK(cb.eval(rat(1232, 1137)) == rat(1751, 2274));
    CHECK(Rat(main.eval(Rat(1)) - cb.eval(Rat(1))) == rat(1, 2208));

    for (int k = 0; k <= 64; ++k) {
        const Rat mu = Rat(main.hi() * k / 64);
        CHECK(cb.eval(mu) <= main.eval(mu));
    }

    // outside the window interval the combination is just the four-case table
    auto cb0 = combined_bound(ExponentParams(Rat(0)));
    CHECK(cb0.breaks == std::vector<Rat>{Rat(0), Rat(1), Rat(2)});
}

TEST_CASE("older conditional envelope for comparison") {
    auto pl = conditional_exponent_bound(ExponentParams(kTheta764));
    REQUIRE(pl.pieces.size() == 4);
    CHECK(pl.breaks == std::vector<Rat>{Rat(0), rat(64, 69), Rat(1), rat(32, 23), Rat(2)});
    CHECK(pl.pieces[0] == PiecewiseLinear::Piece{rat(2, 3), Rat(0)});
    CHECK(pl.pieces[1] == PiecewiseLinear::Piece{rat(1, 2), rat(23, 128)});
    CHECK(pl.pieces[2] == PiecewiseLinear::Piece{rat(1, 4), rat(55, 128)});
    CHECK(pl.pieces[3] == PiecewiseLinear::Piece{rat(1, 2), rat(1, 4)});
    CHECK(pl.eval(Rat(0)) == rat(2, 3));

    auto pl0 = conditional_exponent_bound(ExponentParams(Rat(0)));
    CHECK(pl0.eval(Rat(2)) == Rat(1));
}

TEST_CASE("uniformity thresholds") {
    CHECK(uniformity_threshold(ExponentParams(Rat(0))) == Rat(2));
    CHECK(uniformity_threshold(ExponentParams(kTheta764)) == rat(64, 39));
    CHECK(uniformity_threshold(ExponentParams(rat(1, 4))) == rat(4, 3));
    CHECK_THROWS_AS(uniformity_threshold(ExponentParams(rat(1, 2))), std::invalid_argument);

    CHECK(uniformity_threshold_beta(Rat(2)) == Rat(2));
    CHECK(uniformity_threshold_beta(rat(17, 6)) == rat(17, 11));
    CHECK(uniformity_threshold_beta(Rat(3)) == rat(3, 2));
    CHECK_THROWS_AS(uniformity_threshold_beta(rat(3, 2)), std::invalid_argument);

    CHECK(ExponentParams(kTheta764).kim_sarnak_admissible());
    CHECK_FALSE(ExponentParams(rat(1, 8)).kim_sarnak_admissible());
    CHECK_THROWS_AS(ExponentParams(Rat(-1)), std::invalid_argument);
    CHECK_THROWS_AS(ExponentParams(Rat(1)), std::invalid_argument);
}

TEST_CASE("refined expressions: window evaluations") {
    // small-shift half at the fixed Delta = x^{-6/23}
    for (const Rat& mu : {rat(1, 2), rat(3, 4), rat(9, 10)}) {
        BoundExpr g = substitute_mu(refined_bound_small_shift(), mu);
        auto pl = sup_T_pl(g, Rat(rat(-6, 23) - 1), rat(-6, 23));
        CHECK(pl.eval(rat(-6, 23)) == rat(17, 23));
    }
    {
        // past mu = 22/23 the T ~ 1 endpoint x^{1/2} m^{1/4} takes over
        BoundExpr g = substitute_mu(refined_bound_small_shift(), Rat(1));
        auto pl = sup_T_pl(g, Rat(rat(-6, 23) - 1), rat(-6, 23));
        CHECK(pl.eval(rat(-6, 23)) == rat(3, 4));
    }

    // large-shift half at Delta = x^{-3(1+mu)/23}, across the window and for
    // two admissible eigenvalue exponents
    for (const Rat& th : {kTheta764, rat(17, 160)}) {
        auto wb = window_exponent_bound(ExponentParams(th));
        for (int k = 0; k <= 6; ++k) {
            const Rat mu = Rat(wb.mu_lo + (wb.mu_hi - wb.mu_lo) * k / 6);
            const Rat s = Rat(-3 * (1 + mu) / 23);
            BoundExpr g = substitute_mu(refined_bound_large_shift(th), mu);
            auto pl = sup_T_pl(g, Rat(s - 1), s);
            const Rat want =
                std::max(Rat(17 * (1 + mu) / 46), Rat((13 + 4 * th) * mu / 28 + rat(1, 4)));
            CHECK(pl.eval(s) == want);
        }
    }
}

TEST_CASE("refined large-shift sup: the four named balance points") {
    const Rat mu(1);
    BoundExpr g = substitute_mu(refined_bound_large_shift(kTheta764), mu);
    auto sup = sup_T(g);
    CHECK(has_candidate(sup.candidates, Rat(mu / 4), Rat(0)));            // m^{1/4}
    CHECK(has_candidate(sup.candidates, rat(27, 112), Rat(0)));           // 3mu(1-4theta)/7
    CHECK(has_candidate(sup.candidates, Rat(0), Rat(-1)));                // Delta^{-1}
    CHECK(has_candidate(sup.candidates, rat(21, 80), Rat(0)));            // 12 theta mu / 5
}

TEST_CASE("sup_T_pl dominates every admissible point") {
    std::mt19937_64 rng(0x5eed0002);
    auto rnd = [&](long lo, long hi) {
        long den = 1 + long(rng() % 40);
        long num = lo * den + long(rng() % u64((hi - lo) * den + 1));
        return rat(num, den);
    };
    struct Case {
        BoundExpr e;
        Rat s_lo, s_hi;
    };
    std::vector<Case> cases;
    cases.push_back({substitute_mu(error_bound_small_shift(kTheta764), rat(1, 2)),
                     Rat(-3), Rat(0)});
    cases.push_back({substitute_mu(error_bound_small_shift(rat(1, 9)), Rat(1)),
                     Rat(-3), Rat(0)});
    cases.push_back({substitute_mu(error_bound_large_shift(kTheta764), rat(3, 2)),
                     Rat(-3), rat(-1, 4)});
    cases.push_back({substitute_mu(refined_bound_large_shift(kTheta764), Rat(1)),
                     Rat(-2), rat(-1, 10)});
    for (const auto& c : cases) {
        auto pl = sup_T_pl(c.e, c.s_lo, c.s_hi);
        CHECK(pl.continuous());
        for (int k = 0; k < 150; ++k) {
            const Rat s = Rat(c.s_lo + (c.s_hi - c.s_lo) * rnd(0, 1));
            const Rat t = rnd(0, 3);
            CHECK(eval_expr(c.e, t, s) <= pl.eval(s));
        }
        // and the sup is attained: the t = 0 section never exceeds it
        for (int k = 0; k <= 12; ++k) {
            const Rat s = Rat(c.s_lo + (c.s_hi - c.s_lo) * k / 12);
            CHECK(eval_expr(c.e, Rat(0), s) <= pl.eval(s));
        }
    }
}

TEST_CASE("exponent tables serialize to CSV") {
    ExponentParams params(kTheta764);
    std::ostringstream os;
    write_exponents_csv(os, combined_bound(params));
    const std::string want =
        "mu_num,mu_den,beta_num,beta_den,dominating_term\n"
        "0,1,2,3,2/3\n"
        "32,117,2,3,2/3\n"
        "64,117,2,3,39/128*mu + 1/2\n"
        "6592,10413,185,267,39/128*mu + 1/2\n"
        "64,89,64,89,7/96*mu + 2/3\n"
        "12272,14329,2985,4094,7/96*mu + 2/3\n"
        "160,161,17,23,17/23\n"
        "321,322,17,23,17/23\n"
        "1,1,17,23,17/46*mu + 17/46\n"
        "2369,2274,78931,104604,17/46*mu + 17/46\n"
        "1232,1137,1751,2274,215/448*mu + 1/4\n"
        "41552,37521,58643,75042,215/448*mu + 1/4\n"
        "112,99,157,198,13/32*mu + 1/3\n"
        "1784,1287,355,396,13/32*mu + 1/3\n"
        "64,39,1,1,13/32*mu + 1/3\n";
    CHECK(os.str() == want);

    std::ostringstream oa;
    write_exponents_csv_alpha(oa, base_exponent_bound(ExponentParams(Rat(0))));
    const std::string want_alpha =
        "alpha_num,alpha_den,beta_num,beta_den,dominating_term\n"
        "1,2,1,1,1/3*mu + 1/3\n"
        "2,3,5,6,1/3*mu + 1/3\n"
        "1,1,2,3,1/3*mu + 1/3\n"
        "2,1,2,3,2/3\n";
    CHECK(oa.str() == want_alpha);
}

TEST_CASE("piece formulas and report") {
    CHECK(piece_formula({rat(1, 2), rat(39, 128)}) == "39/128*mu + 1/2");
    CHECK(piece_formula({rat(2, 3), Rat(0)}) == "2/3");
    CHECK(piece_formula({rat(-1, 4), Rat(1)}) == "1*mu - 1/4");
    CHECK(piece_formula({Rat(0), rat(1, 3)}) == "1/3*mu");

    auto rep = piecewise_report(base_exponent_bound(ExponentParams(Rat(0))));
    CHECK(rep ==
          "[0, 1)  beta = 2/3\n"
          "[1, 2]  beta = 1/3*mu + 1/3\n");
}
