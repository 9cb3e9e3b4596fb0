#pragma once
// Experiment harness: sweep (x, m) grids, measure the error term exactly,
// fit empirical growth exponents, and compare them against the exact
// piecewise-linear predictions. Everything known exactly stays rational in
// the CSV output; doubles appear only in fits and ratio summaries.

#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "shiftconv/arith.hpp"
#include "shiftconv/main_term.hpp"
#include "shiftconv/rational.hpp"

namespace shiftconv {

enum class ScanMode : u8 { R_CONV, TAU_CONV };

struct ScanConfig {
    std::vector<u64> x_points;  // strictly increasing
    std::vector<u64> m_values;
    ScanMode mode = ScanMode::R_CONV;
    std::string output_path = "scan.csv";
    unsigned workers = 1;
};

// Flat key=value text, one pair per line; '#' starts a comment. Keys:
//   x_points=65536,131072,...      explicit list, or the dyadic generator
//   x0=131072 ratio=2 count=11     (x0 * ratio^j for j < count)
//   m_values=1,2,4
//   mode=R_CONV|TAU_CONV
//   output_path=scan.csv
//   workers=8
// Unknown keys and malformed values throw std::invalid_argument naming the
// offending line.
ScanConfig parse_scan_config(std::istream& in);

// x strictly increasing, m >= 1, workers >= 1, and max(x) + max(m) within
// the table ceiling; throws std::invalid_argument
void validate_scan_config(const ScanConfig& config);

// One record per (x, m), m-major x-minor, exact integer S. The worker count
// only shards the work; output is identical for any value. In TAU_CONV mode
// the records carry the divisor-convolution sum with main = 0 and E = S
// (no main-term theory is attached to that mode).
std::vector<ErrorRecord> run_scan(const ScanConfig& config);

// header exactly: x,m,s,main_num,main_den,e_num,e_den
void write_records_csv(std::ostream& out, const std::vector<ErrorRecord>& records);

struct FitResult {
    u64 m = 1;
    double slope = 0.0;      // d log|E| / d log x
    double intercept = 0.0;
    int points_used = 0;     // >= 3, zero-E points excluded (log undefined)
    int zero_skipped = 0;
    double r_squared = 1.0;
};

// Least squares of log|E| against log x over the records with this m and
// x_lo <= x <= x_hi. Throws std::invalid_argument on fewer than 3 usable
// points.
FitResult fit_slope(const std::vector<ErrorRecord>& records, u64 m, u64 x_lo = 1,
                    u64 x_hi = std::numeric_limits<u64>::max());

struct TheoryComparison {
    u64 m = 1;
    double mu = 0.0;             // ln m / ln x_max
    double empirical_slope = 0.0;
    double predicted = 0.0;      // combined bound at the given theta
    double predicted_zero = 0.0; // same at theta = 0
    bool flagged = false;        // empirical exceeds predicted + 0.1
};

std::vector<TheoryComparison> compare_with_theory(const std::vector<FitResult>& fits,
                                                  const Rat& theta, u64 x_max);

struct RatioReport {
    u64 m = 1;
    std::vector<std::pair<u64, double>> ratios;  // (x, S / main)
    double first_deviation = 0.0;                // |ratio - 1| at the first x
    double final_deviation = 0.0;                // ... and at the last
    bool tightened = false;                      // final < first
};

// Requires >= 2 records for this m with nonzero main term.
RatioReport ratio_convergence(const std::vector<ErrorRecord>& records, u64 m);

// dyadic x from 2^17 to 2^27, m in {1,2,3,4,5,8,12,16,100}
ScanConfig default_scan_config();

}  // namespace shiftconv
