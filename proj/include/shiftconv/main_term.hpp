#pragma once
// The asymptotic main term of S(x,m) in exact rationals. With m = 2^k * odd,
//
//     main(x,m) = 8 |2^{k+1} - 3| sigma(m / 2^k) * x / m,
//
// which also equals the compact divisor sum 8 sum_{d|m} (-1)^{m+d} d times
// x/m. Both forms are implemented and compared exactly; the measured error
// E(x,m) = S(x,m) - main(x,m) is kept as an exact rational as well.

#include "shiftconv/arith.hpp"
#include "shiftconv/rational.hpp"

namespace shiftconv {

struct MainTermValue {
    Rat coefficient;  // the factor multiplying x/m
    u64 x = 0;
    u64 m = 1;
    Rat value;        // coefficient * x / m
};

struct ErrorRecord {
    u64 x = 0;
    u64 m = 1;
    u64 s_value = 0;
    Rat main;
    Rat e_value;      // s_value - main, exactly
};

Rat main_coefficient(u64 m);          // 8 |2^{k+1} - 3| sigma(m / 2^k)
Rat main_coefficient_compact(u64 m);  // 8 sum_{d|m} (-1)^{m+d} d

Rat main_term(u64 x, u64 m);          // main_coefficient(m) * x / m
MainTermValue main_term_value(u64 x, u64 m);

ErrorRecord error_term(u64 x, u64 m, u64 s_value);

// Leading constants of the spectral asymptotics, normalized so the area and
// 1/pi factors cancel: the full-modular-group count A(4x,4m) grows like
// 24 sigma(m) x/m, the level-2 sum S(x,m) (odd m) like 8 sigma(m) x/m.
// pi_power records that the cancellation really happened (always 0 here);
// value is the rational coefficient of x/m * pi^pi_power.
enum class SpectralGroup { PSL2Z, GAMMA0_2 };

struct SpectralCoefficient {
    Rat value;
    int pi_power = 0;
};

SpectralCoefficient spectral_main_coefficient(SpectralGroup group, u64 m);

// Exhaustive exact check, for all even m <= mmax, that the even-m coefficient
// rewrites agree: 8 (sigma(2^k) - 2) sigma(m/2^k) equals both closed forms,
// and |2^{k+1} - 3| = sigma(2^k) - 2 for k >= 1.
bool even_m_consistency(u64 mmax);

}  // namespace shiftconv
