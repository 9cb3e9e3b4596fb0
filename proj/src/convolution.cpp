#include "shiftconv/convolution.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <vector>

namespace shiftconv {

namespace {

void check_desk(u64 x) {
    if (x > kDeskCeiling) throw std::invalid_argument("lattice enumeration: x past desk ceiling");
}

i64 isqrt_i64(u64 x) {
    i64 r = static_cast<i64>(std::sqrt(static_cast<double>(x)));
    while (r > 0 && u64(r) * u64(r) > x) --r;
    while (u64(r + 1) * u64(r + 1) <= x) ++r;
    return r;
}

// Ordered-pair representation counts c[n] = #{(a,b) : a^2 + b^2 = n} for all
// n <= nmax, found by walking the disk. This is the independent leg of the
// oracle; it never touches divisor sums.
std::vector<u32> pair_counts(u64 nmax) {
    std::vector<u32> c(nmax + 1, 0);
    const i64 amax = isqrt_i64(nmax);
    for (i64 a = -amax; a <= amax; ++a) {
        const u64 a2 = u64(a * a);
        for (i64 b = -amax; b <= amax; ++b) {
            const u64 n = a2 + u64(b * b);
            if (n <= nmax) ++c[n];
        }
    }
    return c;
}

// Same walk, split by the parities of (a, b). Index is (a & 1) << 1 | (b & 1).
std::array<std::vector<u32>, 4> pair_counts_by_parity(u64 nmax) {
    std::array<std::vector<u32>, 4> c;
    for (auto& v : c) v.assign(nmax + 1, 0);
    const i64 amax = isqrt_i64(nmax);
    for (i64 a = -amax; a <= amax; ++a) {
        const u64 a2 = u64(a * a);
        for (i64 b = -amax; b <= amax; ++b) {
            const u64 n = a2 + u64(b * b);
            if (n <= nmax) ++c[((a & 1) << 1) | (b & 1)][n];
        }
    }
    return c;
}

u64 table_sum(u64 x, u64 m, const RTable& table, unsigned workers, TableKind want,
              const char* who) {
    if (table.kind != want)
        throw std::invalid_argument(std::string(who) + ": wrong table kind");
    if (x == 0) return 0;
    if (!table.covers(1, x + m))
        throw std::invalid_argument(std::string(who) + ": table does not cover [1, x+m]");
    const u32* v = table.values.data();
    const u64 off = table.lo;  // v[n - off] = f(n)

    auto partial = [&](u64 a, u64 b) {
        u128 s = 0;
        for (u64 n = a; n <= b; ++n) s += u64(v[n - off]) * v[n + m - off];
        return s;
    };

    u128 total = 0;
    if (workers <= 1 || x < 4096) {
        total = partial(1, x);
    } else {
        std::vector<u128> parts(workers, 0);
        std::vector<std::thread> pool;
        const u64 chunk = (x + workers - 1) / workers;
        for (unsigned i = 0; i < workers; ++i) {
            const u64 a = 1 + u64(i) * chunk;
            const u64 b = std::min(x, a + chunk - 1);
            if (a > b) break;
            pool.emplace_back([&, i, a, b] { parts[i] = partial(a, b); });
        }
        for (auto& t : pool) t.join();
        for (u128 p : parts) total += p;
    }
    if (total > u128(~u64(0))) throw std::overflow_error(std::string(who) + ": sum exceeds 64 bits");
    return static_cast<u64>(total);
}

}  // namespace

u64 shifted_sum(u64 x, u64 m, const RTable& table, unsigned workers) {
    if (m == 0) throw std::invalid_argument("shifted_sum: m must be positive");
    return table_sum(x, m, table, workers, TableKind::R2, "shifted_sum");
}

u64 divisor_shifted_sum(u64 x, u64 m, const RTable& table) {
    if (m == 0) throw std::invalid_argument("divisor_shifted_sum: m must be positive");
    return table_sum(x, m, table, 1, TableKind::TAU, "divisor_shifted_sum");
}

u64 lattice_count_C(u64 x, u64 m) {
    check_desk(x);
    if (m == 0) throw std::invalid_argument("lattice_count_C: m must be positive");
    if (x == 0) return 0;
    const auto reps = pair_counts(x + m);
    const i64 cmax = isqrt_i64(x);
    u64 total = 0;
    for (i64 c = -cmax; c <= cmax; ++c) {
        const u64 c2 = u64(c * c);
        for (i64 d = -cmax; d <= cmax; ++d) {
            const u64 n = c2 + u64(d * d);
            if (n >= 1 && n <= x) total += reps[n + m];
        }
    }
    return total;
}

u64 a_count(u64 x, u64 m) {
    check_desk(x);
    if (m == 0) throw std::invalid_argument("a_count: m must be positive");
    if (x == 0) return 0;
    const auto reps = pair_counts_by_parity(x + m);
    const i64 cmax = isqrt_i64(x);
    u64 total = 0;
    for (i64 c = -cmax; c <= cmax; ++c) {
        const u64 c2 = u64(c * c);
        for (i64 d = -cmax; d <= cmax; ++d) {
            const u64 n = c2 + u64(d * d);
            if (n >= 1 && n <= x) total += reps[((c & 1) << 1) | (d & 1)][n + m];
        }
    }
    return total;
}

Rat a_tilde(u64 x, u64 m) {
    if (m == 0 || m % 2 != 0) throw std::invalid_argument("a_tilde: m must be even");
    if (m % 4 == 0) return Rat(static_cast<unsigned long>(a_count(x, m)));
    // S evaluated through the lattice oracle keeps this module self-contained
    return rat(Int(static_cast<unsigned long>(lattice_count_C(x / 2, m / 2))), Int(2));
}

bool parity_identity_check(u64 x, u64 m) {
    if (m == 0 || m % 2 != 0) throw std::invalid_argument("parity_identity_check: m must be even");
    const u64 s = lattice_count_C(x, m);
    const u64 s_half = lattice_count_C(x / 2, m / 2);
    if (m % 4 != 0) return s == s_half;
    return s + s_half == 2 * a_count(x, m);
}

bool alternating_reduction_check(u64 x, u64 m) {
    if (m == 0 || m % 2 != 0) throw std::invalid_argument("alternating_reduction_check: m must be even");
    const auto [k, odd] = two_adic(m);
    Rat rhs = 0;
    u64 xj = x, mj = m;
    for (int j = 0; j < k; ++j) {
        const Rat term = a_tilde(xj, mj);
        rhs += (j % 2 == 0) ? term : -term;
        xj /= 2;
        mj /= 2;
    }
    rhs *= 2;
    if (rhs.get_den() != 1) return false;  // the doubled sum must be integral
    if (rhs < 0) return false;
    return Rat(static_cast<unsigned long>(lattice_count_C(x, m))) == rhs;
}

}  // namespace shiftconv
