#include "shiftconv/lab.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "shiftconv/convolution.hpp"
#include "shiftconv/exponent_calculus.hpp"

namespace shiftconv {

namespace {

// keep max(x) + max(m) clear of the RTable length limit
const u64 kScanCeiling = u64(1) << 31;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

u64 parse_u64(const std::string& s, const std::string& line) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
        throw std::invalid_argument("scan config: bad integer in line '" + line + "'");
    try {
        return std::stoull(s);
    } catch (const std::out_of_range&) {
        throw std::invalid_argument("scan config: integer overflow in line '" + line + "'");
    }
}

std::vector<u64> parse_u64_list(const std::string& s, const std::string& line) {
    std::vector<u64> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_u64(trim(item), line));
    return out;
}

}  // namespace

ScanConfig parse_scan_config(std::istream& in) {
    ScanConfig cfg;
    u64 x0 = 0, ratio = 0, count = 0;
    bool have_x0 = false, have_ratio = false, have_count = false, have_points = false;

    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string entry = trim(line);
        if (entry.empty()) continue;
        const auto eq = entry.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("scan config: expected key=value in line '" + entry + "'");
        const std::string key = trim(entry.substr(0, eq));
        const std::string value = trim(entry.substr(eq + 1));

        if (key == "x_points") {
            cfg.x_points = parse_u64_list(value, entry);
            have_points = true;
        } else if (key == "x0") {
            x0 = parse_u64(value, entry);
            have_x0 = true;
        } else if (key == "ratio") {
            ratio = parse_u64(value, entry);
            have_ratio = true;
        } else if (key == "count") {
            count = parse_u64(value, entry);
            have_count = true;
        } else if (key == "m_values") {
            cfg.m_values = parse_u64_list(value, entry);
        } else if (key == "mode") {
            if (value == "R_CONV")
                cfg.mode = ScanMode::R_CONV;
            else if (value == "TAU_CONV")
                cfg.mode = ScanMode::TAU_CONV;
            else
                throw std::invalid_argument("scan config: unknown mode '" + value + "'");
        } else if (key == "output_path") {
            cfg.output_path = value;
        } else if (key == "workers") {
            const u64 w = parse_u64(value, entry);
            if (w < 1 || w > 1024)
                throw std::invalid_argument("scan config: workers out of range");
            cfg.workers = unsigned(w);
        } else {
            throw std::invalid_argument("scan config: unknown key '" + key + "'");
        }
    }

    if (have_x0 || have_ratio || have_count) {
        if (have_points)
            throw std::invalid_argument("scan config: give either x_points or the x0/ratio/count generator");
        if (!(have_x0 && have_ratio && have_count))
            throw std::invalid_argument("scan config: dyadic generator needs x0, ratio and count");
        if (x0 < 1 || ratio < 2 || count < 1 || count > 64)
            throw std::invalid_argument("scan config: bad dyadic generator");
        u64 x = x0;
        for (u64 j = 0; j < count; ++j) {
            if (x > kScanCeiling) throw std::invalid_argument("scan config: generator over ceiling");
            cfg.x_points.push_back(x);
            if (j + 1 < count && x > kScanCeiling / ratio)
                throw std::invalid_argument("scan config: generator over ceiling");
            x *= ratio;
        }
    }
    validate_scan_config(cfg);
    return cfg;
}

void validate_scan_config(const ScanConfig& config) {
    for (std::size_t i = 1; i < config.x_points.size(); ++i)
        if (config.x_points[i - 1] >= config.x_points[i])
            throw std::invalid_argument("scan config: x_points must be strictly increasing");
    for (u64 x : config.x_points)
        if (x < 1) throw std::invalid_argument("scan config: x must be positive");
    for (u64 m : config.m_values)
        if (m < 1) throw std::invalid_argument("scan config: m must be positive");
    if (config.workers < 1) throw std::invalid_argument("scan config: workers must be >= 1");
    if (!config.x_points.empty() && !config.m_values.empty()) {
        const u64 xmax = config.x_points.back();
        const u64 mmax = *std::max_element(config.m_values.begin(), config.m_values.end());
        if (xmax > kScanCeiling - mmax)
            throw std::invalid_argument("scan config: max(x) + max(m) over table ceiling");
    }
}

std::vector<ErrorRecord> run_scan(const ScanConfig& config) {
    validate_scan_config(config);
    if (config.x_points.empty() || config.m_values.empty()) return {};

    const u64 mmax = *std::max_element(config.m_values.begin(), config.m_values.end());
    const u64 hi = config.x_points.back() + mmax;
    const RTable table = config.mode == ScanMode::R_CONV
                             ? r2_table(1, hi, u64(1) << 16, config.workers)
                             : tau_table(1, hi, u64(1) << 16, config.workers);

    const std::size_t nx = config.x_points.size();
    const std::size_t cells = config.m_values.size() * nx;
    std::vector<ErrorRecord> records(cells);

    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto work = [&]() {
        try {
            for (std::size_t i = next.fetch_add(1); i < cells; i = next.fetch_add(1)) {
                const u64 m = config.m_values[i / nx];
                const u64 x = config.x_points[i % nx];
                if (config.mode == ScanMode::R_CONV) {
                    records[i] = error_term(x, m, shifted_sum(x, m, table));
                } else {
                    const u64 s = divisor_shifted_sum(x, m, table);
                    records[i] = {x, m, s, Rat(0), Rat(i64(s))};
                }
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
        }
    };

    const unsigned nthreads = std::min<std::size_t>(config.workers, cells);
    if (nthreads <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < nthreads; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);
    return records;
}

void write_records_csv(std::ostream& out, const std::vector<ErrorRecord>& records) {
    out << "x,m,s,main_num,main_den,e_num,e_den\n";
    for (const ErrorRecord& r : records)
        out << r.x << ',' << r.m << ',' << r.s_value << ','
            << r.main.get_num().get_str() << ',' << r.main.get_den().get_str() << ','
            << r.e_value.get_num().get_str() << ',' << r.e_value.get_den().get_str() << '\n';
}

FitResult fit_slope(const std::vector<ErrorRecord>& records, u64 m, u64 x_lo, u64 x_hi) {
    FitResult fit;
    fit.m = m;
    std::vector<double> xs, ys;
    for (const ErrorRecord& r : records) {
        if (r.m != m || r.x < x_lo || r.x > x_hi) continue;
        if (r.e_value == 0) {
            ++fit.zero_skipped;
            continue;
        }
        xs.push_back(std::log(double(r.x)));
        ys.push_back(std::log(std::abs(r.e_value.get_d())));
    }
    if (xs.size() < 3)
        throw std::invalid_argument("fit_slope: fewer than 3 usable points");
    fit.points_used = int(xs.size());

    const std::size_t n = xs.size();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= double(n);
    my /= double(n);
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double pred = fit.intercept + fit.slope * xs[i];
        ss_res += (ys[i] - pred) * (ys[i] - pred);
    }
    fit.r_squared = syy == 0.0 ? 1.0 : 1.0 - ss_res / syy;
    return fit;
}

std::vector<TheoryComparison> compare_with_theory(const std::vector<FitResult>& fits,
                                                  const Rat& theta, u64 x_max) {
    if (x_max < 2) throw std::invalid_argument("compare_with_theory: x_max too small");
    const PiecewiseLinear at_theta = combined_bound(ExponentParams(theta));
    const PiecewiseLinear at_zero = combined_bound(ExponentParams(Rat(0)));
    const double logx = std::log(double(x_max));

    auto eval_clamped = [](const PiecewiseLinear& pl, double mu) {
        Rat q(mu);
        if (q < pl.lo()) q = pl.lo();
        if (q > pl.hi()) q = pl.hi();
        return pl.eval(q).get_d();
    };

    std::vector<TheoryComparison> out;
    for (const FitResult& f : fits) {
        TheoryComparison c;
        c.m = f.m;
        c.mu = std::log(double(f.m)) / logx;
        c.empirical_slope = f.slope;
        c.predicted = eval_clamped(at_theta, c.mu);
        c.predicted_zero = eval_clamped(at_zero, c.mu);
        c.flagged = f.slope > c.predicted + 0.1;
        out.push_back(c);
    }
    return out;
}

RatioReport ratio_convergence(const std::vector<ErrorRecord>& records, u64 m) {
    RatioReport rep;
    rep.m = m;
    for (const ErrorRecord& r : records) {
        if (r.m != m) continue;
        if (r.main == 0)
            throw std::invalid_argument("ratio_convergence: zero main term in records");
        rep.ratios.emplace_back(r.x, double(r.s_value) / r.main.get_d());
    }
    if (rep.ratios.size() < 2)
        throw std::invalid_argument("ratio_convergence: need at least 2 records");
    std::sort(rep.ratios.begin(), rep.ratios.end());
    rep.first_deviation = std::abs(rep.ratios.front().second - 1.0);
    rep.final_deviation = std::abs(rep.ratios.back().second - 1.0);
    rep.tightened = rep.final_deviation < rep.first_deviation;
    return rep;
}

ScanConfig default_scan_config() {
    ScanConfig cfg;
    for (u64 x = u64(1) << 17; x <= u64(1) << 27; x <<= 1) cfg.x_points.push_back(x);
    cfg.m_values = {1, 2, 3, 4, 5, 8, 12, 16, 100};
    return cfg;
}

}  // namespace shiftconv
