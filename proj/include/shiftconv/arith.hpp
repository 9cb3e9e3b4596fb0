#pragma once
// Multiplicative-function groundwork: factorization, sigma/tau, the
// nonprincipal character mod 4, the two-squares representation count
//
//     r2(n) = #{(a,b) in Z^2 : a^2 + b^2 = n} = 4 * sum_{d|n} chi4(d)   (n >= 1),
//
// and segmented window tables of r2 / tau used by the convolution sums.
// Tables are bit-exact regardless of segment size or worker count.

#include <cstdint>
#include <string>
#include <vector>

namespace shiftconv {

using u8 = std::uint8_t;
using u32 = std::uint32_t;
using u64 = std::uint64_t;
using i32 = std::int32_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;

struct PrimePower {
    u64 p;
    u32 e;
    bool operator==(const PrimePower&) const = default;
};

struct Factorization {
    u64 n = 1;
    std::vector<PrimePower> factors;  // ascending primes, exponents >= 1
};

// Deterministic for all 1 <= n <= 2^63 - 1 (Miller-Rabin witnesses + Brent rho).
Factorization factorize(u64 n);

bool is_prime(u64 n);

// m = 2^k * odd, k maximal.
struct TwoAdic {
    int k;
    u64 odd;
};
TwoAdic two_adic(u64 m);

u64 sigma(u64 n);  // sum of divisors; throws std::overflow_error past 2^64
u64 tau(u64 n);    // number of divisors
int chi4(i64 n);   // 0 on even n, +1 on n = 1 (mod 4), -1 on n = 3 (mod 4)
u64 r2(u64 n);     // ordered-pair count; r2(0) = 1 by the (0,0) convention

std::vector<u64> divisors(const Factorization& f);  // ascending

// Window table of r2 or tau values on [lo, hi].
enum class TableKind : u8 { R2 = 0, TAU = 1 };

struct RTable {
    u64 lo = 1;
    u64 hi = 0;
    TableKind kind = TableKind::R2;
    std::vector<u32> values;  // values[n - lo]

    u32 at(u64 n) const;  // bounds-checked; std::out_of_range outside [lo, hi]
    bool covers(u64 a, u64 b) const { return lo <= a && b <= hi; }
};

// Segmented divisor-loop construction. Values are independent of segment_size
// and workers (each segment is computed from scratch; shards write disjoint
// slices). Practical ceiling hi <= 2^50; windows past 2^31 entries are refused
// with std::length_error (capacity), bad arguments with std::invalid_argument.
RTable r2_table(u64 lo, u64 hi, u64 segment_size = u64(1) << 16, unsigned workers = 1);
RTable tau_table(u64 lo, u64 hi, u64 segment_size = u64(1) << 16, unsigned workers = 1);

// Binary dump: magic "RTB1", kind byte, lo and hi as 64-bit LE, then values
// as 32-bit LE.
void dump_rtable(const RTable& table, const std::string& path);
RTable load_rtable(const std::string& path);

}  // namespace shiftconv
