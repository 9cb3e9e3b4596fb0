#include "shiftconv/main_term.hpp"

#include <stdexcept>

namespace shiftconv {

Rat main_coefficient(u64 m) {
    if (m == 0) throw std::invalid_argument("main_coefficient: m must be positive");
    const auto [k, odd] = two_adic(m);
    Int pow2 = Int(1) << (k + 1);
    Int core = abs(pow2 - 3);
    return Rat(8 * core * sigma(odd));
}

Rat main_coefficient_compact(u64 m) {
    if (m == 0) throw std::invalid_argument("main_coefficient_compact: m must be positive");
    Int acc = 0;
    for (u64 d : divisors(factorize(m))) {
        const bool plus = (m + d) % 2 == 0;
        acc += plus ? Int(d) : -Int(d);
    }
    return Rat(8 * acc);
}

Rat main_term(u64 x, u64 m) {
    Rat v = main_coefficient(m) * Rat(static_cast<unsigned long>(x));
    v /= Rat(static_cast<unsigned long>(m));
    return v;
}

MainTermValue main_term_value(u64 x, u64 m) {
    MainTermValue mt;
    mt.coefficient = main_coefficient(m);
    mt.x = x;
    mt.m = m;
    mt.value = mt.coefficient * Rat(static_cast<unsigned long>(x)) /
               Rat(static_cast<unsigned long>(m));
    return mt;
}

ErrorRecord error_term(u64 x, u64 m, u64 s_value) {
    ErrorRecord rec;
    rec.x = x;
    rec.m = m;
    rec.s_value = s_value;
    rec.main = main_term(x, m);
    rec.e_value = Rat(static_cast<unsigned long>(s_value)) - rec.main;
    return rec;
}

SpectralCoefficient spectral_main_coefficient(SpectralGroup group, u64 m) {
    if (m == 0) throw std::invalid_argument("spectral_main_coefficient: m must be positive");
    const u64 s = sigma(m);
    const long scale = group == SpectralGroup::PSL2Z ? 24 : 8;
    return {rat(scale) * Rat(static_cast<unsigned long>(s)), 0};
}

bool even_m_consistency(u64 mmax) {
    if (mmax < 2) throw std::invalid_argument("even_m_consistency: need mmax >= 2");
    for (int k = 1; u64(1) << k <= mmax; ++k) {
        const Int lhs = abs((Int(1) << (k + 1)) - 3);
        const Int rhs = Int(sigma(u64(1) << k)) - 2;
        if (lhs != rhs) return false;
    }
    for (u64 m = 2; m <= mmax; m += 2) {
        const auto [k, odd] = two_adic(m);
        const Rat via_sigma = Rat(8 * (Int(sigma(u64(1) << k)) - 2) * sigma(odd));
        if (via_sigma != main_coefficient(m)) return false;
        if (via_sigma != main_coefficient_compact(m)) return false;
    }
    return true;
}

}  // namespace shiftconv
