#pragma once
// Exact rational scalar used across the library (GMP mpq with a few helpers).
// Everything that feeds an identity check or an exponent table stays rational;
// doubles appear only in least-squares fits and the complex-arithmetic checks.

#include <gmpxx.h>

#include <optional>
#include <string>

namespace shiftconv {

using Rat = mpq_class;
using Int = mpz_class;

// rat(3, -6) -> -1/2, canonicalized with positive denominator.
inline Rat rat(long num, long den = 1) {
    Rat q(num, den);
    q.canonicalize();
    return q;
}

inline Rat rat(const Int& num, const Int& den) {
    Rat q(num, den);
    q.canonicalize();
    return q;
}

// Accepts "p", "p/q", with optional sign. Empty optional on malformed input.
std::optional<Rat> parse_rat(const std::string& text);

// "p/q" (or just "p" when q == 1), base 10.
std::string rat_str(const Rat& q);

}  // namespace shiftconv
