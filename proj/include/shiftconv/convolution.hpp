#pragma once
// Exact shifted convolution sums
//
//     S(x,m) = sum_{1 <= n <= x} r2(n) r2(n+m),
//
// evaluated two independent ways: from a precomputed RTable, and by walking
// the lattice disk c^2 + d^2 <= x directly (the 4-tuple count of pairs
// (a,b,c,d) with a^2+b^2 - c^2-d^2 = m). The disk walk is the desk oracle
// for the table path; the two must agree exactly.
//
// Also here: the parity-restricted count A(x,m) (tuples with a = c and
// b = d mod 2), its half-integral variant, the even-m reduction identities,
// and the divisor analogue sum tau(n) tau(n+m).

#include "shiftconv/arith.hpp"
#include "shiftconv/rational.hpp"

namespace shiftconv {

enum class SumMethod : u8 { TABLE, LATTICE };

struct ConvolutionRecord {
    u64 x = 0;
    u64 m = 1;
    u64 s_value = 0;       // always a multiple of 16
    SumMethod method = SumMethod::TABLE;
};

// sum r2(n) r2(n+m) over 1 <= n <= x, straight from the table. The table must
// cover [1, x+m] and be of kind R2 (invalid_argument otherwise). Workers > 1
// split the index range; the reduction is exact so the result cannot depend
// on the split. Throws overflow_error if the sum leaves 64 bits.
u64 shifted_sum(u64 x, u64 m, const RTable& table, unsigned workers = 1);

// Desk oracle ceiling for the direct lattice enumerations below.
constexpr u64 kDeskCeiling = 100000;

// #{(a,b,c,d) : 1 <= c^2+d^2 <= x, a^2+b^2 = c^2+d^2 + m}, by enumerating the
// (c,d) disk and looking up representation counts from an independent pair
// walk. c = d = 0 is excluded (sums start at n = 1).
u64 lattice_count_C(u64 x, u64 m);

// Same tuples restricted to a = c (mod 2) and b = d (mod 2).
u64 a_count(u64 x, u64 m);

// For even m: equals a_count(x,m) when 4 | m, else S(floor(x/2), m/2) / 2,
// which may be a half-integer. Throws invalid_argument on odd m.
Rat a_tilde(u64 x, u64 m);

// Even-m reduction: S(x,m) = S(x/2, m/2) when 4 does not divide m, and
// S(x,m) = 2 A(x,m) - S(x/2, m/2) when it does. All terms enumerated
// independently. Throws invalid_argument on odd m.
bool parity_identity_check(u64 x, u64 m);

// Alternating reduction down the 2-part of m (k = v2(m)):
//     S(x,m) = 2 sum_{j=0}^{k-1} (-1)^j Atilde(floor(x/2^j), m/2^j).
// The right side is assembled in exact rationals and must come out integral.
bool alternating_reduction_check(u64 x, u64 m);

// sum tau(n) tau(n+m) over 1 <= n <= x from a TAU table covering [1, x+m].
u64 divisor_shifted_sum(u64 x, u64 m, const RTable& table);

inline ConvolutionRecord record_from_table(u64 x, u64 m, const RTable& table) {
    return {x, m, shifted_sum(x, m, table), SumMethod::TABLE};
}

inline ConvolutionRecord record_from_lattice(u64 x, u64 m) {
    return {x, m, lattice_count_C(x, m), SumMethod::LATTICE};
}

}  // namespace shiftconv
