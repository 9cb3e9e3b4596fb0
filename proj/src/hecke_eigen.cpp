#include "shiftconv/hecke_eigen.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace shiftconv {

Cplx eta(u64 m, double t) {
    if (m < 1) throw std::invalid_argument("eta: m must be positive");
    if (!std::isfinite(t)) throw std::invalid_argument("eta: t must be finite");
    Cplx sum(0.0, 0.0);
    for (u64 a : divisors(factorize(m))) {
        const u64 d = m / a;
        sum += std::polar(1.0, t * (std::log(double(a)) - std::log(double(d))));
    }
    return sum;
}

EtaValue eta_value(u64 m, double t) { return {m, t, eta(m, t)}; }

bool hecke_square_relation_check(u64 m, double t, double tol) {
    if (m < 1 || m > 100000)
        throw std::invalid_argument("hecke_square_relation_check: m out of range");
    if (tol < 1e-9) throw std::invalid_argument("hecke_square_relation_check: tol too tight");
    Cplx rhs(0.0, 0.0);
    for (u64 d : divisors(factorize(m))) rhs += eta(d * d, t);
    if (std::abs(rhs.imag()) >= 1e-12) return false;  // conjugate pairing forces real
    return std::abs(std::norm(eta(m, t)) - rhs.real()) < tol;
}

bool hecke_multiplicativity_check(u64 m, u64 n, double t, double tol) {
    if (m < 1 || m > 10000 || n < 1 || n > 10000)
        throw std::invalid_argument("hecke_multiplicativity_check: m, n out of range");
    const Cplx lhs = eta(m, t) * eta(n, t);
    Cplx rhs(0.0, 0.0);
    for (u64 d : divisors(factorize(std::gcd(m, n)))) rhs += eta(m * n / (d * d), t);
    return std::abs(lhs - rhs) < tol;
}

ThetaProxyReport theta_proxy_bound_check(u64 mmax) {
    if (mmax < 1 || mmax > 100000)
        throw std::invalid_argument("theta_proxy_bound_check: mmax out of range");
    ThetaProxyReport rep;
    rep.mmax = mmax;
    const double ts[] = {0.0, 0.5, 1.0, 3.2, 7.77, 13.3, 50.0, 99.0};
    rep.t_samples = int(sizeof(ts) / sizeof(ts[0]));
    for (u64 m = 1; m <= mmax; ++m) {
        const auto f = factorize(m);
        const double bound = (f.factors.size() == 1 && f.factors[0].e == 1)
                                 ? 2.0  // prime: two unit summands
                                 : double(tau(m));
        for (double t : ts) {
            const double excess = std::abs(eta(m, t)) - bound;
            if (excess > rep.max_excess) rep.max_excess = excess;
            if (excess > 1e-9) ++rep.violations;
            ++rep.checked;
        }
    }
    rep.ok = rep.violations == 0;
    return rep;
}

}  // namespace shiftconv
