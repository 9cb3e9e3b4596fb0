#pragma once
// Integer-matrix enumeration in the upper half-plane: exact counts of
// determinant-d^2 matrices moving z0 = i a small hyperbolic distance, the
// quadruple change of variables that turns those counts into sums of
// two-squares representation numbers, and triangular coset representatives
// for the determinant-m action.

#include <complex>
#include <vector>

#include "shiftconv/arith.hpp"
#include "shiftconv/rational.hpp"

namespace shiftconv {

// 2x2 integer matrix (a b; u v) with positive determinant, identified up to
// global sign. The constructor canonicalizes: first nonzero of (a, b, u, v)
// is made positive.
struct IntMat2 {
    i64 a, b, u, v;
    IntMat2(i64 a, i64 b, i64 u, i64 v);  // throws std::invalid_argument if det <= 0
    i64 det() const { return a * v - b * u; }
    bool operator==(const IntMat2&) const = default;
};

IntMat2 operator*(const IntMat2& lhs, const IntMat2& rhs);

// Moebius action on the upper half-plane
std::complex<double> mobius_apply(const IntMat2& g, std::complex<double> z);

// Change of variables A = v - a, B = b + u, C = a + v, D = b - u. Parity
// A == C, B == D (mod 2) holds by construction and C^2 + D^2 - A^2 - B^2
// = 4 det.
struct Quadruple {
    i64 A, B, C, D;
    bool operator==(const Quadruple&) const = default;
};

Quadruple to_quadruple(const IntMat2& g);
IntMat2 from_quadruple(const Quadruple& q);  // throws on parity violation or det <= 0

// point-pair invariant u(z, w) = |z - w|^2 / (4 Im z Im w)
double u_dist(std::complex<double> z, std::complex<double> w);

// u(gamma i, i) = ((v-a)^2 + (b+u)^2) / (4 d^2), exact; requires det = d^2
Rat u_gamma_i(const IntMat2& gamma);  // throws std::invalid_argument on non-square det

// Number of sign-canonical integer matrices with det = d^2 and
// u(gamma i, i) < t, by direct entry enumeration (desk ceiling d <= 10,
// t <= 4). count_M_quadruple counts parity-constrained quadruples with
// A^2 + B^2 < 4 d^2 t on the sphere C^2 + D^2 = 4 d^2 + A^2 + B^2 and halves
// for the sign identification; the two must agree exactly.
u64 count_M_direct(u64 d, const Rat& t);
u64 count_M_quadruple(u64 d, const Rat& t);

// sum_{0 <= n < 4 d^2 t} r2(n) r2(4 d^2 + n), with the n = 0 term counted as
// r2(0) = 1; dominates 2 * count_M_quadruple (parity constraints dropped)
u64 r_weighted_majorant(u64 d, const Rat& t);

// triangular representative (a b; 0 d) of the determinant-m coset action,
// ad = m, 0 <= b < d
struct CosetRep {
    u64 a, b, d;
    bool operator==(const CosetRep&) const = default;
};

// all sigma(m) representatives, ordered by d ascending then b ascending
std::vector<CosetRep> hecke_coset_reps(u64 m);

// the unique triangular representative left-equivalent to gamma under
// PSL2(Z), by row Euclidean reduction; the unimodular cofactor is verified
CosetRep reduce_to_rep(const IntMat2& gamma);

// z0 = i and (i - 1)/2 lie in one PSL2(Z) orbit: find a small gamma0 with
// gamma0 i = (i - 1)/2 and check u-invariance under conjugation on random
// group elements
struct OrbitTransferReport {
    IntMat2 gamma0;
    int samples = 0;
    double max_deviation = 0.0;
    bool ok = false;
};
OrbitTransferReport z0_orbit_transfer();

}  // namespace shiftconv
