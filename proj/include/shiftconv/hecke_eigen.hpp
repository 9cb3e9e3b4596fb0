#pragma once
// The explicit Eisenstein eigenvalue family eta_t(m) = sum_{ad=m} (a/d)^{it}
// and numerical verification of the Hecke relations it satisfies: the square
// relation |eta(m)|^2 = sum_{d|m} eta(d^2), multiplicativity, and the
// divisor bound |eta(m)| <= tau(m).

#include <complex>

#include "shiftconv/arith.hpp"

namespace shiftconv {

using Cplx = std::complex<double>;

struct EtaValue {
    u64 m = 1;
    double t = 0.0;
    Cplx value{1.0, 0.0};
};

// sum over ordered factorizations ad = m of (a/d)^{it}
Cplx eta(u64 m, double t);
EtaValue eta_value(u64 m, double t);

// | |eta(m,t)|^2 - sum_{d|m} eta(d^2,t) | < tol, with the right side real to
// 1e-12 (checked). Preconditions m <= 10^5, tol >= 1e-9.
bool hecke_square_relation_check(u64 m, double t, double tol);

// eta(m,t) eta(n,t) = sum_{d | gcd(m,n)} eta(m n / d^2, t) within tol.
// Preconditions m, n <= 10^4.
bool hecke_multiplicativity_check(u64 m, u64 n, double t, double tol);

// divisor bound |eta(m,t)| <= tau(m) for all m <= mmax on a fixed t grid,
// plus |eta(p,t)| <= 2 on the primes in range (the theta = 0 statement for
// this family)
struct ThetaProxyReport {
    u64 mmax = 0;
    int t_samples = 0;
    u64 checked = 0;        // (m, t) pairs evaluated
    u64 violations = 0;
    double max_excess = 0.0;  // max of |eta| - bound (~0 when ok; equality at t = 0)
    bool ok = false;
};
ThetaProxyReport theta_proxy_bound_check(u64 mmax);

}  // namespace shiftconv
