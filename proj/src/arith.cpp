#include "shiftconv/arith.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace shiftconv {

namespace {

constexpr u64 kTableCeiling = u64(1) << 50;     // documented practical ceiling
constexpr u64 kMaxWindow = u64(1) << 31;        // entries; 8 GiB of u32 values
constexpr u64 kMinSegment = u64(1) << 10;

u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>(u128(a) * b % m); }

u64 powmod(u64 a, u64 e, u64 m) {
    u64 r = 1;
    a %= m;
    while (e) {
        if (e & 1) r = mulmod(r, a, m);
        a = mulmod(a, a, m);
        e >>= 1;
    }
    return r;
}

bool miller_rabin(u64 n, u64 a) {
    if (a % n == 0) return true;
    u64 d = n - 1;
    int s = std::countr_zero(d);
    d >>= s;
    u64 x = powmod(a, d, n);
    if (x == 1 || x == n - 1) return true;
    for (int i = 1; i < s; ++i) {
        x = mulmod(x, x, n);
        if (x == n - 1) return true;
    }
    return false;
}

// Brent's cycle variant of Pollard rho; n odd composite, not a prime power of
// a small prime (those are stripped by trial division first).
u64 pollard_brent(u64 n) {
    if (n % 2 == 0) return 2;
    for (u64 c = 1;; ++c) {
        auto f = [&](u64 x) { return (mulmod(x, x, n) + c) % n; };
        u64 x = 2, y = 2, d = 1, q = 1, ys = y;
        for (u64 r = 1; d == 1; r <<= 1) {
            x = y;
            for (u64 i = 0; i < r; ++i) y = f(y);
            for (u64 k = 0; k < r && d == 1; k += 128) {
                ys = y;
                const u64 lim = std::min<u64>(128, r - k);
                for (u64 i = 0; i < lim; ++i) {
                    y = f(y);
                    q = mulmod(q, x > y ? x - y : y - x, n);
                }
                d = std::gcd(q, n);
            }
        }
        if (d == n) {  // backtrack one step at a time
            d = 1;
            while (d == 1) {
                ys = f(ys);
                d = std::gcd(x > ys ? x - ys : ys - x, n);
            }
        }
        if (d != n) return d;
    }
}

const std::vector<u32>& small_primes() {
    static const std::vector<u32> primes = [] {
        constexpr u32 N = 1 << 16;
        std::vector<bool> comp(N, false);
        std::vector<u32> ps;
        for (u32 i = 2; i < N; ++i) {
            if (comp[i]) continue;
            ps.push_back(i);
            for (u64 j = u64(i) * i; j < N; j += i) comp[j] = true;
        }
        return ps;
    }();
    return primes;
}

void factor_rec(u64 n, std::vector<u64>& out) {
    if (n == 1) return;
    if (is_prime(n)) {
        out.push_back(n);
        return;
    }
    const u64 d = pollard_brent(n);
    factor_rec(d, out);
    factor_rec(n / d, out);
}

u64 isqrt_u64(u64 x) {
    u64 r = static_cast<u64>(std::sqrt(static_cast<double>(x)));
    while (r > 0 && r * r > x) --r;
    while ((r + 1) * (r + 1) <= x) ++r;
    return r;
}

// Shared segmented builder. Weight of a divisor d is chi4(d) for R2 (odd d
// only, times 4 at the end) or 1 for TAU. Each value cell accumulates the
// full divisor sum for its n; the two loops split divisor pairs n = d*k at
// d <= isqrt(end): small divisors are marked directly, large ones are reached
// through their small cofactor k. Unsigned wraparound is fine transiently
// (the finished sums are nonnegative).
void build_segment(std::vector<u32>& vals, u64 table_lo, u64 a, u64 b, TableKind kind) {
    const u64 d0 = isqrt_u64(b);
    if (kind == TableKind::TAU) {
        for (u64 d = 1; d <= d0; ++d) {
            u64 n = std::max(d, ((a + d - 1) / d) * d);
            for (; n <= b; n += d) vals[n - table_lo] += 1;
        }
        const u64 kmax = b / (d0 + 1);
        for (u64 k = 1; k <= kmax; ++k) {
            const u64 dlo = std::max(d0 + 1, (a + k - 1) / k);
            const u64 dhi = b / k;
            for (u64 d = dlo; d <= dhi; ++d) vals[k * d - table_lo] += 1;
        }
        return;
    }
    for (u64 d = 1; d <= d0; d += 2) {
        const u32 w = (d & 3) == 1 ? 1u : ~0u;  // +1 or -1 mod 2^32
        u64 n = std::max(d, ((a + d - 1) / d) * d);
        for (; n <= b; n += d) vals[n - table_lo] += w;
    }
    const u64 kmax = b / (d0 + 1);
    for (u64 k = 1; k <= kmax; ++k) {
        const u64 dlo0 = std::max(d0 + 1, (a + k - 1) / k);
        const u64 dhi = b / k;
        u64 d = dlo0 | 1;  // first odd candidate
        u32 w = (d & 3) == 1 ? 1u : ~0u;
        for (; d <= dhi; d += 2) {
            vals[k * d - table_lo] += w;
            w = 0u - w;  // chi4 alternates sign along consecutive odd d
        }
    }
}

RTable build_table(u64 lo, u64 hi, u64 segment_size, unsigned workers, TableKind kind) {
    if (lo < 1 || lo > hi) throw std::invalid_argument("table window: need 1 <= lo <= hi");
    if (hi > kTableCeiling) throw std::invalid_argument("table window: hi past 2^50 ceiling");
    if (segment_size < kMinSegment) throw std::invalid_argument("table segment_size below 2^10");
    const u64 count = hi - lo + 1;
    if (count > kMaxWindow) throw std::length_error("table window too large for addressable memory");

    RTable t;
    t.lo = lo;
    t.hi = hi;
    t.kind = kind;
    t.values.assign(count, 0);

    const u64 nseg = (count + segment_size - 1) / segment_size;
    if (workers == 0) workers = 1;
    workers = static_cast<unsigned>(std::min<u64>(workers, nseg));

    auto run = [&](unsigned id) {
        for (u64 s = id; s < nseg; s += workers) {
            const u64 a = lo + s * segment_size;
            const u64 b = std::min(hi, a + segment_size - 1);
            build_segment(t.values, lo, a, b, kind);
        }
    };
    if (workers == 1) {
        run(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned id = 0; id < workers; ++id) pool.emplace_back(run, id);
        for (auto& th : pool) th.join();
    }
    if (kind == TableKind::R2)
        for (auto& v : t.values) v *= 4;
    return t;
}

void put_u64le(std::ofstream& out, u64 x) {
    unsigned char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(x >> (8 * i));
    out.write(reinterpret_cast<const char*>(buf), 8);
}

u64 get_u64le(std::ifstream& in) {
    unsigned char buf[8];
    in.read(reinterpret_cast<char*>(buf), 8);
    u64 x = 0;
    for (int i = 0; i < 8; ++i) x |= u64(buf[i]) << (8 * i);
    return x;
}

}  // namespace

bool is_prime(u64 n) {
    if (n < 2) return false;
    for (u64 p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        if (n % p == 0) return n == p;
    }
    for (u64 a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        if (!miller_rabin(n, a)) return false;
    }
    return true;
}

Factorization factorize(u64 n) {
    if (n == 0) throw std::invalid_argument("factorize: n must be positive");
    Factorization f;
    f.n = n;
    std::vector<u64> primes;
    for (u32 p : small_primes()) {
        if (u64(p) * p > n) break;
        while (n % p == 0) {
            primes.push_back(p);
            n /= p;
        }
    }
    factor_rec(n, primes);
    std::sort(primes.begin(), primes.end());
    for (u64 p : primes) {
        if (!f.factors.empty() && f.factors.back().p == p)
            ++f.factors.back().e;
        else
            f.factors.push_back({p, 1});
    }
    return f;
}

TwoAdic two_adic(u64 m) {
    if (m == 0) throw std::invalid_argument("two_adic: m must be positive");
    const int k = std::countr_zero(m);
    return {k, m >> k};
}

u64 sigma(u64 n) {
    const Factorization f = factorize(n);
    u128 acc = 1;
    for (const auto& [p, e] : f.factors) {
        u128 term = 1, pk = 1;
        for (u32 i = 0; i < e; ++i) {
            pk *= p;
            term += pk;
        }
        acc *= term;
        if (acc > u128(~u64(0))) throw std::overflow_error("sigma: exceeds 64 bits");
    }
    return static_cast<u64>(acc);
}

u64 tau(u64 n) {
    const Factorization f = factorize(n);
    u64 acc = 1;
    for (const auto& [p, e] : f.factors) acc *= e + 1;
    return acc;
}

int chi4(i64 n) {
    const int m = static_cast<int>(((n % 4) + 4) % 4);
    if (m == 1) return 1;
    if (m == 3) return -1;
    return 0;
}

u64 r2(u64 n) {
    if (n == 0) return 1;
    u64 odd_part = 1;
    for (const auto& [p, e] : factorize(n).factors) {
        if (p == 2) continue;
        if (p % 4 == 1)
            odd_part *= e + 1;
        else if (e & 1)
            return 0;
    }
    return 4 * odd_part;
}

std::vector<u64> divisors(const Factorization& f) {
    std::vector<u64> ds{1};
    for (const auto& [p, e] : f.factors) {
        const std::size_t base = ds.size();
        u64 pk = 1;
        for (u32 i = 1; i <= e; ++i) {
            pk *= p;
            for (std::size_t j = 0; j < base; ++j) ds.push_back(ds[j] * pk);
        }
    }
    std::sort(ds.begin(), ds.end());
    return ds;
}

u32 RTable::at(u64 n) const {
    if (n < lo || n > hi) throw std::out_of_range("RTable::at: n outside window");
    return values[n - lo];
}

RTable r2_table(u64 lo, u64 hi, u64 segment_size, unsigned workers) {
    return build_table(lo, hi, segment_size, workers, TableKind::R2);
}

RTable tau_table(u64 lo, u64 hi, u64 segment_size, unsigned workers) {
    return build_table(lo, hi, segment_size, workers, TableKind::TAU);
}

void dump_rtable(const RTable& table, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("dump_rtable: cannot open " + path);
    out.write("RTB1", 4);
    const char kind = static_cast<char>(table.kind);
    out.write(&kind, 1);
    put_u64le(out, table.lo);
    put_u64le(out, table.hi);
    for (u32 v : table.values) {
        unsigned char buf[4];
        for (int i = 0; i < 4; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
        out.write(reinterpret_cast<const char*>(buf), 4);
    }
    if (!out) throw std::runtime_error("dump_rtable: write failed to " + path);
}

RTable load_rtable(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_rtable: cannot open " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "RTB1", 4) != 0)
        throw std::runtime_error("load_rtable: bad magic in " + path);
    char kind;
    in.read(&kind, 1);
    if (kind != 0 && kind != 1) throw std::runtime_error("load_rtable: bad kind byte");
    RTable t;
    t.kind = static_cast<TableKind>(kind);
    t.lo = get_u64le(in);
    t.hi = get_u64le(in);
    if (!in || t.lo < 1 || t.lo > t.hi || t.hi - t.lo + 1 > kMaxWindow)
        throw std::runtime_error("load_rtable: bad window");
    const u64 count = t.hi - t.lo + 1;
    t.values.resize(count);
    for (u64 i = 0; i < count; ++i) {
        unsigned char buf[4];
        in.read(reinterpret_cast<char*>(buf), 4);
        u32 v = 0;
        for (int j = 0; j < 4; ++j) v |= u32(buf[j]) << (8 * j);
        t.values[i] = v;
    }
    if (!in) throw std::runtime_error("load_rtable: truncated values in " + path);
    return t;
}

}  // namespace shiftconv
