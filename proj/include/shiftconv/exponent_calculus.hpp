#pragma once
// Exact optimization of exponent skeletons.
//
// The error analysis produces bounds of the shape
//
//     E(x,m)  <<  F(Delta, T)   for every T >= 4, some 0 < Delta < ...,
//
// where F is a finite sum/min/max tree of monomials x^a m^b T^c Delta^d.
// Writing m = x^mu, T = x^t, Delta = x^s turns every monomial into an affine
// form in (t, s), so  inf_Delta sup_T F  is a one-dimensional piecewise-linear
// problem that can be solved exactly over the rationals:
//
//   * sup over t >= 0 is attained at t = 0, at a pairwise balance point of
//     two monomials (an affine function of s), or in the limit t -> infinity
//     (only when the tree's t-growth is zero; positive growth is divergent);
//   * the resulting envelope is an explicit piecewise-linear function of s,
//     and inf over s is a finite scan of its breakpoints.
//
// Sum nodes are treated as max nodes: at the level of polynomial exponents,
// x^a + x^b and max(x^a, x^b) are the same skeleton.
//
// Everything downstream (the four-case error exponent beta(mu), the refined
// window bound, their combination, and the comparison envelope) is produced
// by this engine, with exact rational breakpoints and slopes.

#include <iosfwd>
#include <string>
#include <vector>

#include "shiftconv/arith.hpp"
#include "shiftconv/rational.hpp"

namespace shiftconv {

using QExp = Rat;  // exact rational exponent

struct Monomial {
    Rat ex, em, et, ed;  // x^ex m^em T^et Delta^ed
    bool operator==(const Monomial&) const = default;
};

enum class ExprKind : u8 { MONO, SUM, MIN, MAX };

struct BoundExpr {
    ExprKind kind = ExprKind::MONO;
    Monomial leaf;                    // meaningful when kind == MONO
    std::vector<BoundExpr> children;  // >= 2 entries otherwise
};

BoundExpr mono(Rat ex, Rat em = Rat(0), Rat et = Rat(0), Rat ed = Rat(0));
BoundExpr expr_sum(std::vector<BoundExpr> children);
BoundExpr expr_min(std::vector<BoundExpr> children);
BoundExpr expr_max(std::vector<BoundExpr> children);

// scale every leaf by a monomial factor (exponent addition)
BoundExpr expr_scale(const BoundExpr& e, const Monomial& factor);

std::vector<Monomial> expr_leaves(const BoundExpr& e);

struct ExponentParams {
    Rat theta;  // eigenvalue exponent, 0 <= theta <= 1/2
    explicit ExponentParams(const Rat& th);
    bool kim_sarnak_admissible() const { return theta <= rat(7, 64); }
};

// Continuous piecewise-linear function on [breaks.front(), breaks.back()].
// Piece i is intercept + slope * u on [breaks[i], breaks[i+1]], closed on the
// left and open on the right (the last piece is closed on both ends).
struct PiecewiseLinear {
    struct Piece {
        Rat intercept, slope;
        bool operator==(const Piece&) const = default;
    };
    std::vector<Rat> breaks;
    std::vector<Piece> pieces;

    Rat lo() const { return breaks.front(); }
    Rat hi() const { return breaks.back(); }
    Rat eval(const Rat& u) const;  // std::out_of_range outside the domain
    bool continuous() const;
};

// ---- engine primitives ----

// Set m = x^mu: fold every leaf's m-exponent into its x-exponent.
BoundExpr substitute_mu(const BoundExpr& e, const Rat& mu);

// One sup-over-T branch: the substitution t = p + q * s, admissible where
// p + q * s >= 0. (0,0) is the T >= 4 endpoint.
struct TCandidate {
    Rat p, q;
    bool operator==(const TCandidate&) const = default;
};

struct SupTResult {
    BoundExpr source;                   // the substituted tree the sup ranges over
    std::vector<TCandidate> candidates; // endpoint + pairwise balance branches
    bool has_limit_branch = false;      // t -> infinity contributes (t-growth 0)
    BoundExpr envelope;                 // max over branch-substituted trees, Delta only
};

// e must be mu-substituted (no m-exponents left). Throws std::domain_error
// "divergent" when the tree grows with T (sup is +infinity).
SupTResult sup_T(const BoundExpr& e);

// Exact value of sup_{t >= 0} e as a piecewise-linear function of s on
// [s_lo, s_hi], branch admissibility handled by clipping.
PiecewiseLinear sup_T_pl(const BoundExpr& e, const Rat& s_lo, const Rat& s_hi);

struct DeltaRange {
    bool bounded_below = false;
    Rat s_lo;        // used when bounded_below
    Rat s_hi;        // Delta < x^{s_hi}
};

struct InfDeltaResult {
    Rat value;             // optimal x-exponent
    Rat delta_exponent;    // a witness s attaining it
};

// inf over the Delta range of sup_T(e). Throws std::domain_error on an empty
// range ("infeasible") or when the infimum runs away to -infinity.
InfDeltaResult inf_Delta(const SupTResult& sup, const DeltaRange& range);

// ---- built-in bound expressions (x, m, T, Delta symbolic) ----

// Shift below x: F = x Delta + x^{1/2} T^{1/2} min(1, (T Delta)^{-3/2})
//                            * (1 + min(m^theta, m^{1/2} T^{-1}))
BoundExpr error_bound_small_shift(const Rat& theta);

// Shift above x: F = m^{1/2} x^{1/2} Delta + m^{1/4} x^{1/4} T^{1/2} * (same tail)
BoundExpr error_bound_large_shift(const Rat& theta);

// Refined T-expressions behind the window improvement (the Delta term is not
// included; these feed sup_T directly).
//   small shift: x^{1/2} T^{-1/12} min(1,(T Delta)^{-3/2}) max(T, m^{1/4})
//   large shift: (mx)^{1/4} T^{-3/2} min(1,(T Delta)^{-3/2})
//                 * min(m^theta T^2, T^{17/12} max(T, m^{1/4}))
BoundExpr refined_bound_small_shift();
BoundExpr refined_bound_large_shift(const Rat& theta);

// ---- published envelopes, produced by the optimizer ----

// inf over Delta of sup over T of the shift-appropriate built-in bound at a
// single mu: the small-shift expression with Delta < 1 for mu <= 1, the
// large-shift expression with Delta < (x/m)^{1/2} for mu > 1.
Rat optimized_error_exponent(const ExponentParams& params, const Rat& mu);

// The four-case error exponent beta(mu) on [0, 2/(1+2 theta)], reconstructed
// from exact inf-sup evaluations of the built-in expressions (grid sampling,
// collinear-run detection, exact intersection breakpoints, then exact
// re-verification of every piece). Throws std::invalid_argument for theta
// outside [0, 1/2).
PiecewiseLinear base_exponent_bound(const ExponentParams& params);

// The refined bound max(17/23, 17(1+mu)/46, (13+4 theta) mu/28 + 1/4) on its
// validity window in mu. Throws std::domain_error("improvement not
// applicable") unless 5/48 < theta <= 7/64.
struct WindowedBound {
    PiecewiseLinear pl;  // domain = [mu_lo, mu_hi]
    Rat mu_lo, mu_hi;    // open window endpoints
};
WindowedBound window_exponent_bound(const ExponentParams& params);

// Pointwise minimum of the two bounds above: the refined bound where its
// window applies, the four-case bound elsewhere.
PiecewiseLinear combined_bound(const ExponentParams& params);

// Comparison envelope of the older conditional bound:
// max(2/3, 1/2 + (1+4 theta) mu/8, 1/3 + mu/3,
//     min(1/2 + mu/4, 1/4 + (3+4 theta) mu/8)) on [0, 2].
PiecewiseLinear conditional_exponent_bound(const ExponentParams& params);

Rat uniformity_threshold(const ExponentParams& params);  // 2/(1+2 theta)
Rat uniformity_threshold_beta(const Rat& beta);          // beta/(beta-1), beta >= 2

// ---- reporting ----

// CSV rows mu_num,mu_den,beta_num,beta_den,dominating_term: one row per
// breakpoint and one per piece midpoint; dominating_term is the affine form
// of the active piece.
void write_exponents_csv(std::ostream& out, const PiecewiseLinear& pl);

// Same table on the alpha = 1/mu axis (x = m^alpha); pieces at mu = 0 have
// no finite alpha and are dropped.
void write_exponents_csv_alpha(std::ostream& out, const PiecewiseLinear& pl);

std::string piece_formula(const PiecewiseLinear::Piece& piece);  // "39/128*mu + 1/2"
std::string piecewise_report(const PiecewiseLinear& pl);

}  // namespace shiftconv
