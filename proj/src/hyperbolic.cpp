#include "shiftconv/hyperbolic.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace shiftconv {

namespace {

i64 isqrt_i64(i64 n) {
    if (n < 0) return -1;
    i64 r = i64(std::sqrt(double(n)));
    while (r > 0 && r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

i64 floor_div(i64 a, i64 b) {
    i64 q = a / b, r = a % b;
    return (r != 0 && (r < 0) != (b < 0)) ? q - 1 : q;
}

void check_desk_ceiling(u64 d, const Rat& t) {
    if (d < 1 || d > 10 || t <= 0 || t > 4)
        throw std::invalid_argument("count_M: over desk ceiling (need 1 <= d <= 10, 0 < t <= 4)");
}

}  // namespace

IntMat2::IntMat2(i64 a_, i64 b_, i64 u_, i64 v_) : a(a_), b(b_), u(u_), v(v_) {
    if (det() <= 0) throw std::invalid_argument("IntMat2: determinant must be positive");
    for (i64 e : {a, b, u, v}) {
        if (e > 0) break;
        if (e < 0) {
            a = -a;
            b = -b;
            u = -u;
            v = -v;
            break;
        }
    }
}

IntMat2 operator*(const IntMat2& l, const IntMat2& r) {
    return {l.a * r.a + l.b * r.u, l.a * r.b + l.b * r.v,
            l.u * r.a + l.v * r.u, l.u * r.b + l.v * r.v};
}

std::complex<double> mobius_apply(const IntMat2& g, std::complex<double> z) {
    return (double(g.a) * z + double(g.b)) / (double(g.u) * z + double(g.v));
}

Quadruple to_quadruple(const IntMat2& g) {
    return {g.v - g.a, g.b + g.u, g.a + g.v, g.b - g.u};
}

IntMat2 from_quadruple(const Quadruple& q) {
    if ((q.A - q.C) % 2 != 0 || (q.B - q.D) % 2 != 0)
        throw std::invalid_argument("from_quadruple: parity violation");
    return {(q.C - q.A) / 2, (q.B + q.D) / 2, (q.B - q.D) / 2, (q.C + q.A) / 2};
}

double u_dist(std::complex<double> z, std::complex<double> w) {
    if (!(z.imag() > 0) || !(w.imag() > 0))
        throw std::invalid_argument("u_dist: points must have positive imaginary part");
    return std::norm(z - w) / (4 * z.imag() * w.imag());
}

Rat u_gamma_i(const IntMat2& g) {
    const i64 det = g.det();
    const i64 d = isqrt_i64(det);
    if (d * d != det) throw std::invalid_argument("u_gamma_i: non-square determinant");
    const i64 da = g.v - g.a, bu = g.b + g.u;
    return rat(Int(da) * da + Int(bu) * bu, Int(4) * det);
}

u64 count_M_direct(u64 d, const Rat& t) {
    check_desk_ceiling(d, t);
    const i64 m = i64(d * d);
    const Rat cap = 4 * m * t;  // strict bound on (v-a)^2 + (b+u)^2
    const double td = t.get_d();
    const i64 E = i64(std::ceil(double(d) * (std::sqrt(td) + std::sqrt(1.0 + td)))) + 1;

    u64 count = 0;
    auto within = [&](i64 vv, i64 aa, i64 bb, i64 uu) {
        const i64 da = vv - aa, bu = bb + uu;
        return cmp(cap, da * da + bu * bu) > 0;
    };
    // canonical matrices with a > 0: v is determined by the determinant
    for (i64 a = 1; a <= E; ++a)
        for (i64 b = -E; b <= E; ++b)
            for (i64 u = -E; u <= E; ++u) {
                const i64 num = m + b * u;
                if (num % a != 0) continue;
                if (within(num / a, a, b, u)) ++count;
            }
    // a = 0: det = -b u = m, so b > 0 is the canonical sign and v is free
    for (i64 b = 1; b <= E; ++b) {
        if (m % b != 0) continue;
        const i64 u = -m / b;
        for (i64 v = -E; v <= E; ++v)
            if (within(v, 0, b, u)) ++count;
    }
    return count;
}

u64 count_M_quadruple(u64 d, const Rat& t) {
    check_desk_ceiling(d, t);
    const i64 m = i64(d * d);
    const Rat cap = 4 * m * t;  // strict bound on A^2 + B^2
    const double td = t.get_d();
    const i64 alim = i64(std::ceil(2.0 * double(d) * std::sqrt(td))) + 1;

    u64 tuples = 0;
    for (i64 A = -alim; A <= alim; ++A)
        for (i64 B = -alim; B <= alim; ++B) {
            if (cmp(cap, A * A + B * B) <= 0) continue;
            const i64 n = 4 * m + A * A + B * B;
            const i64 cmax = isqrt_i64(n);
            for (i64 C = -cmax; C <= cmax; ++C) {
                if ((C - A) % 2 != 0) continue;
                const i64 dd = n - C * C;
                const i64 D0 = isqrt_i64(dd);
                if (D0 * D0 != dd) continue;
                if ((D0 - B) % 2 != 0) continue;
                tuples += D0 == 0 ? 1 : 2;
            }
        }
    if (tuples % 2 != 0) throw std::logic_error("count_M_quadruple: odd tuple count");
    return tuples / 2;
}

u64 r_weighted_majorant(u64 d, const Rat& t) {
    const Rat cap = 4 * Rat(Int(u64(d) * d)) * t;
    if (cmp(cap, 10000000L) > 0)
        throw std::invalid_argument("r_weighted_majorant: 4 d^2 t over table range");
    u64 sum = 0;
    const u64 base = 4 * d * d;
    for (u64 n = 0; cmp(cap, i64(n)) > 0; ++n)
        sum += (n == 0 ? 1 : r2(n)) * r2(base + n);
    return sum;
}

std::vector<CosetRep> hecke_coset_reps(u64 m) {
    if (m < 1) throw std::invalid_argument("hecke_coset_reps: m must be positive");
    std::vector<CosetRep> reps;
    for (u64 dd : divisors(factorize(m)))
        for (u64 b = 0; b < dd; ++b) reps.push_back({m / dd, b, dd});
    return reps;
}

CosetRep reduce_to_rep(const IntMat2& gamma) {
    const i64 m = gamma.det();
    i64 a = gamma.a, b = gamma.b, u = gamma.u, v = gamma.v;
    // zero the bottom-left entry by a Euclidean ladder of unimodular row ops:
    // subtract a multiple of the second row, then rotate (0 1; -1 0)
    while (u != 0) {
        const i64 q = floor_div(a, u);
        a -= q * u;
        b -= q * v;
        std::swap(a, u);
        std::swap(b, v);
        u = -u;
        v = -v;
    }
    if (a < 0) {  // -Id is identified
        a = -a;
        b = -b;
        v = -v;
    }
    const i64 dd = v;  // = m / a > 0
    b -= floor_div(b, dd) * dd;

    // cofactor check: (a b; 0 dd) * adj(gamma) must be m times a unimodular
    // matrix of determinant +1
    const i64 l11 = a * gamma.v - b * gamma.u, l12 = -a * gamma.b + b * gamma.a;
    const i64 l21 = -dd * gamma.u, l22 = dd * gamma.a;
    if (l11 % m || l12 % m || l21 % m || l22 % m ||
        (l11 / m) * (l22 / m) - (l12 / m) * (l21 / m) != 1)
        throw std::logic_error("reduce_to_rep: cofactor is not unimodular");
    return {u64(a), u64(b), u64(dd)};
}

OrbitTransferReport z0_orbit_transfer() {
    const std::complex<double> i01(0.0, 1.0), target(-0.5, 0.5);

    OrbitTransferReport rep{IntMat2(1, 0, 0, 1), 0, 0.0, false};
    bool found = false;
    for (i64 a = -2; a <= 2 && !found; ++a)
        for (i64 b = -2; b <= 2 && !found; ++b)
            for (i64 u = -2; u <= 2 && !found; ++u)
                for (i64 v = -2; v <= 2 && !found; ++v) {
                    if (a * v - b * u != 1) continue;
                    const IntMat2 g(a, b, u, v);
                    if (std::abs(mobius_apply(g, i01) - target) < 1e-12) {
                        rep.gamma0 = g;
                        found = true;
                    }
                }
    if (!found) return rep;

    const IntMat2& g0 = rep.gamma0;
    const IntMat2 g0inv(g0.v, -g0.b, -g0.u, g0.a);
    const std::complex<double> w = mobius_apply(g0, i01);

    std::mt19937_64 rng(0x5eed0003);
    const IntMat2 gens[3] = {IntMat2(1, 1, 0, 1), IntMat2(1, -1, 0, 1), IntMat2(0, -1, 1, 0)};
    for (int s = 0; s < 100; ++s) {
        IntMat2 g(1, 0, 0, 1);
        const int len = 1 + int(rng() % 8);
        for (int k = 0; k < len; ++k) g = g * gens[rng() % 3];
        const double lhs = u_dist(mobius_apply(g * g0, i01), w);
        const double rhs = u_dist(mobius_apply(g0inv * (g * g0), i01), i01);
        rep.max_deviation = std::max(rep.max_deviation, std::abs(lhs - rhs));
        ++rep.samples;
    }
    rep.ok = rep.max_deviation < 1e-12;
    return rep;
}

}  // namespace shiftconv
