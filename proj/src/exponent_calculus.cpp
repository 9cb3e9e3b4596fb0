#include "shiftconv/exponent_calculus.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace shiftconv {

namespace {

using PL = PiecewiseLinear;
using Piece = PL::Piece;

Rat piece_at(const Piece& p, const Rat& u) { return Rat(p.intercept + p.slope * u); }

PL pl_affine(const Rat& intercept, const Rat& slope, const Rat& lo, const Rat& hi) {
    PL f;
    f.breaks = {lo, hi};
    f.pieces = {{intercept, slope}};
    return f;
}

const Piece& seg_at(const PL& f, const Rat& x0, const Rat& x1) {
    for (std::size_t i = 0; i < f.pieces.size(); ++i)
        if (f.breaks[i] <= x0 && x1 <= f.breaks[i + 1]) return f.pieces[i];
    throw std::logic_error("piecewise: no piece covers segment");
}

// Pointwise max (or min) of two PL functions on the intersection of their
// domains. Crossings inside a common segment become new breakpoints; equal
// adjacent pieces are merged, so representations stay canonical.
PL merge2(const PL& f, const PL& g, bool take_max) {
    const Rat lo = std::max(f.lo(), g.lo());
    const Rat hi = std::min(f.hi(), g.hi());
    if (!(lo < hi)) throw std::logic_error("piecewise merge: empty domain");

    std::vector<Rat> bs;
    for (const auto& src : {f.breaks, g.breaks})
        for (const Rat& b : src)
            if (lo <= b && b <= hi) bs.push_back(b);
    std::sort(bs.begin(), bs.end());
    bs.erase(std::unique(bs.begin(), bs.end()), bs.end());

    PL out;
    out.breaks = {lo};
    std::size_t i = 0;
    while (i + 1 < bs.size()) {
        const Rat x0 = bs[i], x1 = bs[i + 1];
        const Piece p1 = seg_at(f, x0, x1);
        const Piece p2 = seg_at(g, x0, x1);
        if (p1.slope != p2.slope) {
            const Rat xc = (p2.intercept - p1.intercept) / (p1.slope - p2.slope);
            if (x0 < xc && xc < x1) {
                bs.insert(bs.begin() + i + 1, xc);
                continue;
            }
        }
        const Rat xm = (x0 + x1) / 2;
        const bool first_wins = (piece_at(p1, xm) >= piece_at(p2, xm)) == take_max;
        const Piece pick = first_wins ? p1 : p2;
        if (!out.pieces.empty() && out.pieces.back() == pick)
            out.breaks.back() = x1;
        else {
            out.pieces.push_back(pick);
            out.breaks.push_back(x1);
        }
        ++i;
    }
    return out;
}

PL pl_max(const PL& f, const PL& g) { return merge2(f, g, true); }
PL pl_min(const PL& f, const PL& g) { return merge2(f, g, false); }

PL pl_restrict(const PL& f, const Rat& lo, const Rat& hi) {
    PL out;
    out.breaks = {lo};
    for (std::size_t i = 0; i < f.pieces.size(); ++i) {
        const Rat x0 = std::max(f.breaks[i], lo);
        const Rat x1 = std::min(f.breaks[i + 1], hi);
        if (x0 < x1) {
            out.pieces.push_back(f.pieces[i]);
            out.breaks.push_back(x1);
        }
    }
    if (out.pieces.empty()) throw std::logic_error("piecewise restrict: empty result");
    return out;
}

PL pl_concat(const std::vector<PL>& parts) {
    PL out = parts.front();
    for (std::size_t k = 1; k < parts.size(); ++k) {
        const PL& p = parts[k];
        if (p.breaks.front() != out.breaks.back())
            throw std::logic_error("piecewise concat: domains not adjacent");
        for (std::size_t i = 0; i < p.pieces.size(); ++i) {
            if (!out.pieces.empty() && out.pieces.back() == p.pieces[i])
                out.breaks.back() = p.breaks[i + 1];
            else {
                out.pieces.push_back(p.pieces[i]);
                out.breaks.push_back(p.breaks[i + 1]);
            }
        }
    }
    return out;
}

// max of acc (full domain [lo, hi]) with b (sub-domain); acc wins outside b
PL pl_max_partial(const PL& acc, const PL& b, const Rat& lo, const Rat& hi) {
    const Rat blo = b.lo(), bhi = b.hi();
    std::vector<PL> parts;
    if (lo < blo) parts.push_back(pl_restrict(acc, lo, blo));
    parts.push_back(pl_max(pl_restrict(acc, blo, bhi), b));
    if (bhi < hi) parts.push_back(pl_restrict(acc, bhi, hi));
    return pl_concat(parts);
}

// smallest value anywhere on the domain; witness is the largest attaining
// breakpoint (so flat stretches report their right edge)
std::pair<Rat, Rat> pl_min_value(const PL& f) {
    Rat best, wit;
    bool have = false;
    for (std::size_t i = 0; i < f.pieces.size(); ++i)
        for (const Rat& x : {f.breaks[i], f.breaks[i + 1]}) {
            const Rat v = piece_at(f.pieces[i], x);
            if (!have || v < best || (v == best && x > wit)) {
                best = v;
                wit = x;
                have = true;
            }
        }
    return {best, wit};
}

void require_substituted(const BoundExpr& e) {
    for (const Monomial& l : expr_leaves(e))
        if (l.em != 0)
            throw std::invalid_argument("exponent engine: substitute mu before optimizing");
}

// tree evaluated along t = p + q*s, as a PL function of s
PL tree_pl(const BoundExpr& e, const Rat& p, const Rat& q, const Rat& lo, const Rat& hi) {
    if (e.kind == ExprKind::MONO)
        return pl_affine(Rat(e.leaf.ex + e.leaf.et * p), Rat(e.leaf.ed + e.leaf.et * q), lo, hi);
    PL acc = tree_pl(e.children[0], p, q, lo, hi);
    for (std::size_t i = 1; i < e.children.size(); ++i)
        acc = merge2(acc, tree_pl(e.children[i], p, q, lo, hi), e.kind != ExprKind::MIN);
    return acc;
}

// growth rate in t of the whole tree (max through MAX/SUM, min through MIN)
Rat growth_t(const BoundExpr& e) {
    if (e.kind == ExprKind::MONO) return e.leaf.et;
    Rat g = growth_t(e.children[0]);
    for (std::size_t i = 1; i < e.children.size(); ++i) {
        const Rat c = growth_t(e.children[i]);
        if (e.kind == ExprKind::MIN ? c < g : c > g) g = c;
    }
    return g;
}

// subtree surviving t -> infinity: keep only extremal-growth children. When
// the total growth is 0, every kept leaf has t-exponent 0, so dropping the
// t-part is exact.
BoundExpr limit_expr(const BoundExpr& e) {
    if (e.kind == ExprKind::MONO) {
        BoundExpr l = e;
        l.leaf.et = 0;
        return l;
    }
    const Rat g = growth_t(e);
    std::vector<BoundExpr> kept;
    for (const BoundExpr& c : e.children)
        if (growth_t(c) == g) kept.push_back(limit_expr(c));
    if (kept.size() == 1) return kept[0];
    BoundExpr out;
    out.kind = e.kind;
    out.children = std::move(kept);
    return out;
}

BoundExpr substitute_t(const BoundExpr& e, const Rat& p, const Rat& q) {
    if (e.kind == ExprKind::MONO) {
        BoundExpr l;
        l.leaf = {Rat(e.leaf.ex + e.leaf.et * p), Rat(0), Rat(0), Rat(e.leaf.ed + e.leaf.et * q)};
        return l;
    }
    BoundExpr out;
    out.kind = e.kind;
    for (const BoundExpr& c : e.children) out.children.push_back(substitute_t(c, p, q));
    return out;
}

bool cand_less(const TCandidate& a, const TCandidate& b) {
    if (a.p != b.p) return a.p < b.p;
    return a.q < b.q;
}

std::vector<TCandidate> balance_candidates(const BoundExpr& e) {
    const auto ls = expr_leaves(e);
    std::vector<TCandidate> out{{Rat(0), Rat(0)}};
    for (std::size_t i = 0; i < ls.size(); ++i)
        for (std::size_t j = i + 1; j < ls.size(); ++j) {
            if (ls[i].et == ls[j].et) continue;
            const Rat d = ls[i].et - ls[j].et;
            out.push_back({Rat((ls[j].ex - ls[i].ex) / d), Rat((ls[j].ed - ls[i].ed) / d)});
        }
    std::sort(out.begin(), out.end(), cand_less);
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// sentinel standing in for s = -infinity; all genuine breakpoints of the
// expressions handled here are tiny rationals, which is asserted below
const long kFarLeft = 1000000;
const long kInteriorCap = 10000;

}  // namespace

BoundExpr mono(Rat ex, Rat em, Rat et, Rat ed) {
    BoundExpr e;
    e.leaf = {std::move(ex), std::move(em), std::move(et), std::move(ed)};
    return e;
}

static BoundExpr make_node(ExprKind k, std::vector<BoundExpr> cs) {
    if (cs.size() < 2) throw std::invalid_argument("BoundExpr node needs >= 2 children");
    BoundExpr e;
    e.kind = k;
    e.children = std::move(cs);
    return e;
}

BoundExpr expr_sum(std::vector<BoundExpr> cs) { return make_node(ExprKind::SUM, std::move(cs)); }
BoundExpr expr_min(std::vector<BoundExpr> cs) { return make_node(ExprKind::MIN, std::move(cs)); }
BoundExpr expr_max(std::vector<BoundExpr> cs) { return make_node(ExprKind::MAX, std::move(cs)); }

BoundExpr expr_scale(const BoundExpr& e, const Monomial& f) {
    if (e.kind == ExprKind::MONO)
        return mono(Rat(e.leaf.ex + f.ex), Rat(e.leaf.em + f.em), Rat(e.leaf.et + f.et),
                    Rat(e.leaf.ed + f.ed));
    BoundExpr out;
    out.kind = e.kind;
    for (const BoundExpr& c : e.children) out.children.push_back(expr_scale(c, f));
    return out;
}

std::vector<Monomial> expr_leaves(const BoundExpr& e) {
    std::vector<Monomial> out;
    std::function<void(const BoundExpr&)> walk = [&](const BoundExpr& n) {
        if (n.kind == ExprKind::MONO)
            out.push_back(n.leaf);
        else
            for (const BoundExpr& c : n.children) walk(c);
    };
    walk(e);
    return out;
}

ExponentParams::ExponentParams(const Rat& th) : theta(th) {
    if (th < 0 || th > rat(1, 2))
        throw std::invalid_argument("ExponentParams: theta outside [0, 1/2]");
}

Rat PiecewiseLinear::eval(const Rat& u) const {
    if (u < lo() || u > hi()) throw std::out_of_range("PiecewiseLinear::eval: outside domain");
    for (std::size_t i = 0; i < pieces.size(); ++i)
        if (u <= breaks[i + 1]) return piece_at(pieces[i], u);
    return piece_at(pieces.back(), u);
}

bool PiecewiseLinear::continuous() const {
    for (std::size_t i = 1; i < pieces.size(); ++i)
        if (piece_at(pieces[i - 1], breaks[i]) != piece_at(pieces[i], breaks[i])) return false;
    return true;
}

BoundExpr substitute_mu(const BoundExpr& e, const Rat& mu) {
    if (mu < 0) throw std::invalid_argument("substitute_mu: mu must be nonnegative");
    if (e.kind == ExprKind::MONO)
        return mono(Rat(e.leaf.ex + mu * e.leaf.em), Rat(0), e.leaf.et, e.leaf.ed);
    BoundExpr out;
    out.kind = e.kind;
    for (const BoundExpr& c : e.children) out.children.push_back(substitute_mu(c, mu));
    return out;
}

SupTResult sup_T(const BoundExpr& e) {
    require_substituted(e);
    const Rat g = growth_t(e);
    if (g > 0) throw std::domain_error("sup_T: divergent (bound grows with T)");

    SupTResult res;
    res.source = e;
    res.candidates = balance_candidates(e);
    res.has_limit_branch = (g == 0);

    std::vector<BoundExpr> branches;
    for (const TCandidate& c : res.candidates) branches.push_back(substitute_t(e, c.p, c.q));
    if (res.has_limit_branch) branches.push_back(substitute_t(limit_expr(e), Rat(0), Rat(0)));
    res.envelope = branches.size() == 1 ? branches[0] : expr_max(std::move(branches));
    return res;
}

PiecewiseLinear sup_T_pl(const BoundExpr& e, const Rat& s_lo, const Rat& s_hi) {
    require_substituted(e);
    if (!(s_lo < s_hi)) throw std::invalid_argument("sup_T_pl: empty s interval");
    const Rat g = growth_t(e);
    if (g > 0) throw std::domain_error("sup_T: divergent (bound grows with T)");

    PL env = tree_pl(e, Rat(0), Rat(0), s_lo, s_hi);  // t = 0, valid everywhere
    for (const TCandidate& c : balance_candidates(e)) {
        if (c.p == 0 && c.q == 0) continue;
        Rat blo = s_lo, bhi = s_hi;  // clip to the region where p + q s >= 0
        if (c.q == 0) {
            if (c.p < 0) continue;
        } else if (c.q > 0) {
            blo = std::max(s_lo, Rat(-c.p / c.q));
        } else {
            bhi = std::min(s_hi, Rat(-c.p / c.q));
        }
        if (!(blo < bhi)) continue;  // empty or single point (no new sup by continuity)
        env = pl_max_partial(env, tree_pl(e, c.p, c.q, blo, bhi), s_lo, s_hi);
    }
    if (g == 0) env = pl_max(env, tree_pl(limit_expr(e), Rat(0), Rat(0), s_lo, s_hi));
    return env;
}

InfDeltaResult inf_Delta(const SupTResult& sup, const DeltaRange& range) {
    if (range.bounded_below && range.s_lo > range.s_hi)
        throw std::domain_error("inf_Delta: infeasible Delta range");
    if (range.bounded_below && range.s_lo == range.s_hi) {
        const PL env = sup_T_pl(sup.source, Rat(range.s_lo - 1), range.s_hi);
        return {env.eval(range.s_hi), range.s_hi};
    }
    const Rat lo = range.bounded_below ? range.s_lo : Rat(-kFarLeft);
    if (!(lo < range.s_hi)) throw std::domain_error("inf_Delta: infeasible Delta range");

    const PL env = sup_T_pl(sup.source, lo, range.s_hi);
    if (!range.bounded_below) {
        for (std::size_t i = 1; i + 1 < env.breaks.size(); ++i)
            if (abs(env.breaks[i]) > kInteriorCap)
                throw std::logic_error("inf_Delta: envelope structure beyond sentinel range");
        if (env.pieces.front().slope > 0)
            throw std::domain_error("inf_Delta: infimum unbounded below");
    }
    auto [value, witness] = pl_min_value(env);
    return {value, witness};
}

// ---- built-in expressions ----

namespace {

Monomial mprod(const Monomial& a, const Monomial& b) {
    return {Rat(a.ex + b.ex), Rat(a.em + b.em), Rat(a.et + b.et), Rat(a.ed + b.ed)};
}

BoundExpr leaf(const Monomial& m) {
    BoundExpr e;
    e.leaf = m;
    return e;
}

const Monomial kOne{Rat(0), Rat(0), Rat(0), Rat(0)};
// min(1, (T Delta)^{-3/2}) second option
const Monomial kTail32{Rat(0), Rat(0), rat(-3, 2), rat(-3, 2)};

}  // namespace

BoundExpr error_bound_small_shift(const Rat& theta) {
    const Monomial base{rat(1, 2), Rat(0), rat(1, 2), Rat(0)};
    const Monomial fa{Rat(0), theta, Rat(0), Rat(0)};          // m^theta
    const Monomial fb{Rat(0), rat(1, 2), Rat(-1), Rat(0)};     // m^{1/2} T^{-1}
    auto branch = [&](const Monomial& f1) {
        const Monomial b = mprod(base, f1);
        return expr_sum({leaf(b), expr_min({leaf(mprod(b, fa)), leaf(mprod(b, fb))})});
    };
    return expr_sum({mono(Rat(1), Rat(0), Rat(0), Rat(1)),  // x Delta
                     expr_min({branch(kOne), branch(kTail32)})});
}

BoundExpr error_bound_large_shift(const Rat& theta) {
    const Monomial base{rat(1, 4), rat(1, 4), rat(1, 2), Rat(0)};
    const Monomial fa{Rat(0), theta, Rat(0), Rat(0)};
    const Monomial fb{Rat(0), rat(1, 2), Rat(-1), Rat(0)};
    auto branch = [&](const Monomial& f1) {
        const Monomial b = mprod(base, f1);
        return expr_sum({leaf(b), expr_min({leaf(mprod(b, fa)), leaf(mprod(b, fb))})});
    };
    return expr_sum({mono(rat(1, 2), rat(1, 2), Rat(0), Rat(1)),  // m^{1/2} x^{1/2} Delta
                     expr_min({branch(kOne), branch(kTail32)})});
}

BoundExpr refined_bound_small_shift() {
    const Monomial base{rat(1, 2), Rat(0), rat(-1, 12), Rat(0)};  // x^{1/2} T^{-3/2+17/12}
    const Monomial ft{Rat(0), Rat(0), Rat(1), Rat(0)};            // T
    const Monomial fm{Rat(0), rat(1, 4), Rat(0), Rat(0)};         // m^{1/4}
    auto branch = [&](const Monomial& f1) {
        const Monomial b = mprod(base, f1);
        return expr_max({leaf(mprod(b, ft)), leaf(mprod(b, fm))});
    };
    return expr_min({branch(kOne), branch(kTail32)});
}

BoundExpr refined_bound_large_shift(const Rat& theta) {
    const Monomial base{rat(1, 4), rat(1, 4), rat(-3, 2), Rat(0)};  // (mx)^{1/4} T^{-3/2}
    const Monomial fa{Rat(0), theta, Rat(2), Rat(0)};               // m^theta T^2
    const Monomial fb{Rat(0), Rat(0), rat(29, 12), Rat(0)};         // T^{29/12}
    const Monomial fc{Rat(0), rat(1, 4), rat(17, 12), Rat(0)};      // m^{1/4} T^{17/12}
    auto branch = [&](const Monomial& f1) {
        const Monomial b = mprod(base, f1);
        return expr_min({leaf(mprod(b, fa)), expr_max({leaf(mprod(b, fb)), leaf(mprod(b, fc))})});
    };
    return expr_min({branch(kOne), branch(kTail32)});
}

// ---- optimizer-driven envelopes ----

Rat optimized_error_exponent(const ExponentParams& params, const Rat& mu) {
    const bool small = mu <= 1;
    const BoundExpr F =
        small ? error_bound_small_shift(params.theta) : error_bound_large_shift(params.theta);
    DeltaRange range;
    range.s_hi = small ? Rat(0) : Rat((1 - mu) / 2);  // Delta < 1 resp. (x/m)^{1/2}
    return inf_Delta(sup_T(substitute_mu(F, mu)), range).value;
}

namespace {

PL merge_equal_pieces(const PL& f) {
    PL out;
    out.breaks = {f.breaks.front()};
    for (std::size_t i = 0; i < f.pieces.size(); ++i) {
        if (!out.pieces.empty() && out.pieces.back() == f.pieces[i])
            out.breaks.back() = f.breaks[i + 1];
        else {
            out.pieces.push_back(f.pieces[i]);
            out.breaks.push_back(f.breaks[i + 1]);
        }
    }
    return out;
}

// Exact reconstruction of a piecewise-linear function from an oracle:
// sample a grid, classify each gap by whether its secant is genuine (the gap
// midpoint lies on it), group genuine gaps into affine runs, place the run
// junctions at exact line intersections, then re-verify the assembled
// function at every grid point and inside every piece. Any inconsistency
// rejects the attempt and the caller refines the grid.
std::optional<PL> try_reconstruct(const Rat& hi, const std::function<Rat(const Rat&)>& f,
                                  long n) {
    std::vector<Rat> mu(n + 1);
    std::vector<Rat> val(n + 1);
    for (long k = 0; k <= n; ++k) {
        mu[k] = Rat(hi * k / n);
        val[k] = f(mu[k]);
    }
    struct Gap {
        Piece line;
        bool genuine;
    };
    std::vector<Gap> gaps(n);
    for (long k = 0; k < n; ++k) {
        const Rat slope = (val[k + 1] - val[k]) / (mu[k + 1] - mu[k]);
        const Rat intercept = val[k] - slope * mu[k];
        const Rat mid = (mu[k] + mu[k + 1]) / 2;
        gaps[k] = {{intercept, slope}, f(mid) == intercept + slope * mid};
    }
    if (!gaps.front().genuine || !gaps.back().genuine) return std::nullopt;

    std::vector<Piece> lines{gaps[0].line};
    std::vector<Rat> bps;
    auto intersect = [](const Piece& a, const Piece& b) -> std::optional<Rat> {
        if (a.slope == b.slope) return std::nullopt;
        return Rat((b.intercept - a.intercept) / (a.slope - b.slope));
    };
    long k = 1;
    while (k < n) {
        const Piece& cur = lines.back();
        if (gaps[k].genuine && gaps[k].line == cur) {
            ++k;
            continue;
        }
        if (gaps[k].genuine) {  // junction exactly at the grid point mu[k]
            const auto bp = intersect(cur, gaps[k].line);
            if (!bp || *bp != mu[k]) return std::nullopt;
            bps.push_back(*bp);
            lines.push_back(gaps[k].line);
            ++k;
            continue;
        }
        // mixed gap: must be bracketed by genuine gaps of distinct lines,
        // with the junction strictly inside
        if (k + 1 >= n || !gaps[k + 1].genuine || gaps[k + 1].line == cur) return std::nullopt;
        const auto bp = intersect(cur, gaps[k + 1].line);
        if (!bp || !(mu[k] < *bp && *bp < mu[k + 1])) return std::nullopt;
        if (f(*bp) != piece_at(cur, *bp)) return std::nullopt;
        bps.push_back(*bp);
        lines.push_back(gaps[k + 1].line);
        k += 2;
    }

    PL out;
    out.breaks.push_back(Rat(0));
    for (const Rat& b : bps) out.breaks.push_back(b);
    out.breaks.push_back(hi);
    out.pieces = lines;
    if (out.breaks.size() != out.pieces.size() + 1) return std::nullopt;
    for (std::size_t i = 1; i < out.breaks.size(); ++i)
        if (!(out.breaks[i - 1] < out.breaks[i])) return std::nullopt;

    for (long idx = 0; idx <= n; ++idx)
        if (out.eval(mu[idx]) != val[idx]) return std::nullopt;
    for (std::size_t i = 0; i < out.pieces.size(); ++i) {
        for (int part : {1, 2}) {  // two interior probes per piece
            const Rat u = out.breaks[i] + (out.breaks[i + 1] - out.breaks[i]) * part / 3;
            if (f(u) != out.eval(u)) return std::nullopt;
        }
    }
    return merge_equal_pieces(out);
}

PL reconstruct_pl(const Rat& hi, const std::function<Rat(const Rat&)>& f) {
    for (long n : {96, 384, 1536}) {
        if (auto pl = try_reconstruct(hi, f, n)) return *pl;
    }
    throw std::logic_error("piecewise reconstruction did not stabilize");
}

}  // namespace

PiecewiseLinear base_exponent_bound(const ExponentParams& params) {
    if (params.theta >= rat(1, 2))
        throw std::invalid_argument("base_exponent_bound: theta outside [0, 1/2)");
    const Rat upper = 2 / (1 + 2 * params.theta);
    return reconstruct_pl(upper,
                          [&](const Rat& mu) { return optimized_error_exponent(params, mu); });
}

WindowedBound window_exponent_bound(const ExponentParams& params) {
    const Rat& th = params.theta;
    if (!(th > rat(5, 48) && th <= rat(7, 64)))
        throw std::domain_error("improvement not applicable");
    const Rat lo = 5 / std::min(Rat(92 * th - 5), Rat(46 * th));
    const Rat hi = Rat(7) / Rat(11 * (1 - 4 * th));
    if (!(lo < hi)) throw std::domain_error("improvement not applicable");

    PL env = pl_max(pl_affine(rat(17, 23), Rat(0), lo, hi),
                    pl_affine(rat(17, 46), rat(17, 46), lo, hi));
    env = pl_max(env, pl_affine(rat(1, 4), Rat((13 + 4 * th) / 28), lo, hi));
    return {env, lo, hi};
}

PiecewiseLinear combined_bound(const ExponentParams& params) {
    PL main = base_exponent_bound(params);
    if (!(params.theta > rat(5, 48) && params.theta <= rat(7, 64))) return main;

    const WindowedBound wb = window_exponent_bound(params);
    std::vector<PL> parts;
    if (main.lo() < wb.mu_lo) parts.push_back(pl_restrict(main, main.lo(), wb.mu_lo));
    parts.push_back(pl_min(pl_restrict(main, wb.mu_lo, wb.mu_hi), wb.pl));
    if (wb.mu_hi < main.hi()) parts.push_back(pl_restrict(main, wb.mu_hi, main.hi()));
    return merge_equal_pieces(pl_concat(parts));
}

PiecewiseLinear conditional_exponent_bound(const ExponentParams& params) {
    const Rat& th = params.theta;
    const Rat lo(0), hi(2);
    PL env = pl_max(pl_affine(rat(2, 3), Rat(0), lo, hi),
                    pl_affine(rat(1, 2), Rat((1 + 4 * th) / 8), lo, hi));
    env = pl_max(env, pl_affine(rat(1, 3), rat(1, 3), lo, hi));
    env = pl_max(env, pl_min(pl_affine(rat(1, 2), rat(1, 4), lo, hi),
                             pl_affine(rat(1, 4), Rat((3 + 4 * th) / 8), lo, hi)));
    return env;
}

Rat uniformity_threshold(const ExponentParams& params) {
    if (params.theta >= rat(1, 2))
        throw std::invalid_argument("uniformity_threshold: theta outside [0, 1/2)");
    return 2 / (1 + 2 * params.theta);
}

Rat uniformity_threshold_beta(const Rat& beta) {
    if (beta < 2) throw std::invalid_argument("uniformity_threshold_beta: beta must be >= 2");
    return Rat(beta / (beta - 1));
}

// ---- reporting ----

std::string piece_formula(const PiecewiseLinear::Piece& piece) {
    if (piece.slope == 0) return rat_str(piece.intercept);
    std::string s = rat_str(piece.slope) + "*mu";
    if (piece.intercept > 0)
        s += " + " + rat_str(piece.intercept);
    else if (piece.intercept < 0)
        s += " - " + rat_str(Rat(-piece.intercept));
    return s;
}

namespace {

void csv_row(std::ostream& out, const Rat& u, const Rat& v, const std::string& term) {
    out << u.get_num().get_str() << ',' << u.get_den().get_str() << ','
        << v.get_num().get_str() << ',' << v.get_den().get_str() << ',' << term << '\n';
}

}  // namespace

void write_exponents_csv(std::ostream& out, const PiecewiseLinear& pl) {
    out << "mu_num,mu_den,beta_num,beta_den,dominating_term\n";
    for (std::size_t i = 0; i < pl.pieces.size(); ++i) {
        const std::string term = piece_formula(pl.pieces[i]);
        const Rat mid = (pl.breaks[i] + pl.breaks[i + 1]) / 2;
        csv_row(out, pl.breaks[i], piece_at(pl.pieces[i], pl.breaks[i]), term);
        csv_row(out, mid, piece_at(pl.pieces[i], mid), term);
    }
    csv_row(out, pl.breaks.back(), piece_at(pl.pieces.back(), pl.breaks.back()),
            piece_formula(pl.pieces.back()));
}

void write_exponents_csv_alpha(std::ostream& out, const PiecewiseLinear& pl) {
    out << "alpha_num,alpha_den,beta_num,beta_den,dominating_term\n";
    // increasing alpha = decreasing mu; the mu = 0 end has no finite alpha
    for (std::size_t ri = pl.pieces.size(); ri-- > 0;) {
        const std::string term = piece_formula(pl.pieces[ri]);
        const Rat right = pl.breaks[ri + 1];
        const Rat left = pl.breaks[ri];
        if (ri + 1 == pl.pieces.size())
            csv_row(out, Rat(1 / right), piece_at(pl.pieces[ri], right), term);
        const Rat mid = (left + right) / 2;
        if (mid > 0) csv_row(out, Rat(1 / mid), piece_at(pl.pieces[ri], mid), term);
        if (left > 0) csv_row(out, Rat(1 / left), piece_at(pl.pieces[ri], left), term);
    }
}

std::string piecewise_report(const PiecewiseLinear& pl) {
    std::ostringstream os;
    for (std::size_t i = 0; i < pl.pieces.size(); ++i) {
        const bool last = i + 1 == pl.pieces.size();
        os << '[' << rat_str(pl.breaks[i]) << ", " << rat_str(pl.breaks[i + 1])
           << (last ? "]" : ")") << "  beta = " << piece_formula(pl.pieces[i]) << '\n';
    }
    return os.str();
}

}  // namespace shiftconv
