// Command-line front end for the shiftconv library.
//
//   shiftconv sum 100000 12          exact S(x,m), main term and error
//   shiftconv exponents --theta 7/64 piecewise error-exponent tables
//   shiftconv scan sweep.cfg         grid experiment -> CSV + fit report
//   shiftconv verify                 quick end-to-end identity suite
//
// Exit codes: 0 success, 1 usage or runtime error, 2 verification failure.

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "shiftconv/arith.hpp"
#include "shiftconv/convolution.hpp"
#include "shiftconv/exponent_calculus.hpp"
#include "shiftconv/hecke_eigen.hpp"
#include "shiftconv/hyperbolic.hpp"
#include "shiftconv/lab.hpp"
#include "shiftconv/main_term.hpp"
#include "shiftconv/rational.hpp"

namespace {

using namespace shiftconv;

Rat rat_flag(const std::string& text, const std::string& flag) {
    const auto q = parse_rat(text);
    if (!q) throw std::invalid_argument(flag + ": expected a rational like 7/64, got '" + text + "'");
    return *q;
}

std::string rat_line(const Rat& q) {
    std::ostringstream os;
    os << rat_str(q) << "  (" << std::setprecision(12) << q.get_d() << ")";
    return os.str();
}

int cmd_sieve(u64 lo, u64 hi, const std::string& kind, const std::string& out,
              unsigned workers) {
    const RTable table = kind == "tau" ? tau_table(lo, hi, u64(1) << 16, workers)
                                       : r2_table(lo, hi, u64(1) << 16, workers);
    dump_rtable(table, out);
    std::cout << kind << " table on [" << lo << ", " << hi << "], "
              << table.values.size() << " values -> " << out << "\n";
    return 0;
}

int cmd_sum(u64 x, u64 m, const std::string& kind, unsigned workers) {
    if (kind == "s") {
        const RTable table = r2_table(1, x + m, u64(1) << 16, workers);
        const ErrorRecord rec = error_term(x, m, shifted_sum(x, m, table, workers));
        std::cout << "S(" << x << ", " << m << ") = " << rec.s_value << "\n"
                  << "main           = " << rat_line(rec.main) << "\n"
                  << "E = S - main   = " << rat_line(rec.e_value) << "\n";
    } else if (kind == "a") {
        std::cout << "A(" << x << ", " << m << ") = " << a_count(x, m) << "\n";
    } else {
        const RTable table = tau_table(1, x + m, u64(1) << 16, workers);
        std::cout << "D(" << x << ", " << m << ") = "
                  << divisor_shifted_sum(x, m, table) << "\n";
    }
    return 0;
}

int cmd_main_term(u64 m, u64 x) {
    const Rat coeff = main_coefficient(m);
    const Rat compact = main_coefficient_compact(m);
    const TwoAdic tw = two_adic(m);
    std::cout << "m = " << m << " = 2^" << tw.k << " * " << tw.odd << "\n"
              << "coefficient 8|2^(k+1) - 3| sigma(m/2^k) = " << rat_str(coeff) << "\n"
              << "compact form 8 sum_{d|m} (-1)^(m+d) d   = " << rat_str(compact)
              << (coeff == compact ? "" : "   ** MISMATCH **") << "\n";
    if (x > 0) {
        const MainTermValue v = main_term_value(x, m);
        std::cout << "main(" << x << ", " << m << ") = coefficient * x/m = "
                  << rat_line(v.value) << "\n";
    }
    return coeff == compact ? 0 : 2;
}

int cmd_lattice(u64 d, const Rat& t) {
    const u64 direct = count_M_direct(d, t);
    const u64 quad = count_M_quadruple(d, t);
    const u64 majorant = r_weighted_majorant(d, t);
    std::cout << "M(" << rat_str(t) << ") at det " << d * d << ":\n"
              << "  matrix enumeration    = " << direct << "\n"
              << "  quadruple enumeration = " << quad
              << (direct == quad ? "" : "   ** MISMATCH **") << "\n"
              << "  r2-weighted majorant  = " << majorant << "\n";
    return direct == quad ? 0 : 2;
}

void print_fit_report(const std::vector<ErrorRecord>& records, const ScanConfig& cfg,
                      const Rat& theta) {
    std::vector<FitResult> fits;
    for (u64 m : cfg.m_values) {
        try {
            fits.push_back(fit_slope(records, m));
        } catch (const std::invalid_argument&) {
            std::cout << "m = " << m << ": fewer than 3 usable points, no fit\n";
        }
    }
    if (fits.empty()) return;

    const auto cmp = compare_with_theory(fits, theta, cfg.x_points.back());
    std::cout << "\nfits of log|E| against log x, bounds at theta = "
              << rat_str(theta) << ":\n"
              << "       m        mu     slope       R^2  beta(theta)   beta(0)\n";
    for (std::size_t i = 0; i < fits.size(); ++i) {
        std::cout << std::setw(8) << cmp[i].m << "  " << std::fixed
                  << std::setprecision(4) << std::setw(8) << cmp[i].mu << "  "
                  << std::setw(8) << cmp[i].empirical_slope << "  " << std::setw(8)
                  << fits[i].r_squared << "  " << std::setw(11) << cmp[i].predicted
                  << "  " << std::setw(8) << cmp[i].predicted_zero
                  << (cmp[i].flagged ? "   ** above bound **" : "") << "\n";
        std::cout.unsetf(std::ios::fixed);
        std::cout << std::setprecision(6);
    }

    std::cout << "\nS / main convergence:\n";
    for (u64 m : cfg.m_values) {
        try {
            const RatioReport rep = ratio_convergence(records, m);
            std::cout << "m = " << std::setw(6) << m << ": |S/main - 1| "
                      << std::setprecision(4) << rep.first_deviation << " -> "
                      << rep.final_deviation
                      << (rep.tightened ? "" : "   ** not tightening **") << "\n";
        } catch (const std::invalid_argument&) {
        }
    }
    std::cout << std::setprecision(6);
}

int cmd_scan(const std::string& config_path, const std::string& out_override,
             unsigned workers_override, const Rat& theta) {
    ScanConfig cfg;
    if (config_path.empty()) {
        cfg = default_scan_config();
    } else {
        std::ifstream in(config_path);
        if (!in) throw std::runtime_error("cannot open config file " + config_path);
        cfg = parse_scan_config(in);
    }
    if (!out_override.empty()) cfg.output_path = out_override;
    if (workers_override > 0) cfg.workers = workers_override;
    validate_scan_config(cfg);

    const auto records = run_scan(cfg);
    std::ofstream out(cfg.output_path);
    if (!out) throw std::runtime_error("cannot open output file " + cfg.output_path);
    write_records_csv(out, records);
    std::cout << records.size() << " records -> " << cfg.output_path << "\n";

    if (cfg.mode == ScanMode::R_CONV && !records.empty())
        print_fit_report(records, cfg, theta);
    return 0;
}

int cmd_exponents(const Rat& theta, const std::string& mu_text,
                  const std::string& out, const std::string& table_sel,
                  const std::string& axis) {
    const ExponentParams params(theta);
    const PiecewiseLinear base = base_exponent_bound(params);
    const PiecewiseLinear combined = combined_bound(params);
    const PiecewiseLinear conditional = conditional_exponent_bound(params);

    bool have_window = true;
    WindowedBound window;
    try {
        window = window_exponent_bound(params);
    } catch (const std::domain_error&) {
        have_window = false;
    }

    if (!mu_text.empty()) {
        const Rat mu = rat_flag(mu_text, "--mu");
        std::cout << "exponents at theta = " << rat_str(theta) << ", mu = "
                  << rat_str(mu) << " (m = x^mu):\n";
        std::cout << "  base bound      beta = " << rat_line(base.eval(mu)) << "\n";
        if (have_window && mu > window.mu_lo && mu < window.mu_hi)
            std::cout << "  window bound    beta = " << rat_line(window.pl.eval(mu))
                      << "\n";
        std::cout << "  combined        beta = " << rat_line(combined.eval(mu)) << "\n"
                  << "  conditional     beta = " << rat_line(conditional.eval(mu))
                  << "\n";
        return 0;
    }

    std::cout << "error exponents at theta = " << rat_str(theta)
              << ":  |E(x, x^mu)| << x^(beta + eps) for\n\n";
    std::cout << "base bound:\n" << piecewise_report(base) << "\n";
    if (have_window)
        std::cout << "window improvement on (" << rat_str(window.mu_lo) << ", "
                  << rat_str(window.mu_hi) << "):\n" << piecewise_report(window.pl)
                  << "\n";
    else
        std::cout << "window improvement: not applicable at this theta\n\n";
    std::cout << "combined:\n" << piecewise_report(combined) << "\n";
    std::cout << "conditional comparison:\n" << piecewise_report(conditional) << "\n";
    std::cout << "nontrivial range: beta < 1 for mu < "
              << rat_str(uniformity_threshold(params)) << " (i.e. m up to x^"
              << rat_str(uniformity_threshold(params)) << ")\n";

    if (!out.empty()) {
        const PiecewiseLinear* chosen = &combined;
        if (table_sel == "base") chosen = &base;
        else if (table_sel == "conditional") chosen = &conditional;
        else if (table_sel == "window") {
            if (!have_window)
                throw std::runtime_error("no window improvement at this theta");
            chosen = &window.pl;
        } else if (table_sel != "combined") {
            throw std::invalid_argument("--table: expected base|window|combined|conditional");
        }
        std::ofstream os(out);
        if (!os) throw std::runtime_error("cannot open output file " + out);
        if (axis == "alpha")
            write_exponents_csv_alpha(os, *chosen);
        else
            write_exponents_csv(os, *chosen);
        std::cout << table_sel << " table (" << axis << " axis) -> " << out << "\n";
    }
    return 0;
}

int cmd_verify(unsigned workers) {
    int failures = 0;
    auto check = [&failures](const std::string& label, bool ok) {
        std::cout << (ok ? "[ok]   " : "[FAIL] ") << label << "\n";
        if (!ok) ++failures;
    };

    {
        const RTable table = r2_table(1, 2060, u64(1) << 16, workers);
        bool ok = true;
        int cells = 0;
        const std::vector<u64> xs = {1,  2,  3,  5,  8,  13,  21,  34, 55,
                                     89, 144, 233, 377, 610, 987, 1597, 2000};
        for (u64 x : xs)
            for (u64 m = 1; m <= 20; ++m, ++cells)
                ok = ok && shifted_sum(x, m, table) == lattice_count_C(x, m);
        check("S(x,m): table path equals lattice disk walk (" +
                  std::to_string(cells) + " cells)",
              ok);
    }
    {
        bool ok = true;
        for (u64 x : {100, 1000})
            for (u64 m = 2; m <= 32; m += 2)
                ok = ok && parity_identity_check(x, m) && alternating_reduction_check(x, m);
        check("even m: parity reduction and alternating-sum identity", ok);
    }
    {
        bool ok = even_m_consistency(100000);
        for (u64 m = 1; m <= 100000; ++m)
            ok = ok && main_coefficient(m) == main_coefficient_compact(m);
        check("main term: closed form equals compact divisor sum (m <= 100000)", ok);
    }
    {
        const ExponentParams params(rat(7, 64));
        const PiecewiseLinear base = base_exponent_bound(params);
        const PiecewiseLinear combined = combined_bound(params);
        bool ok = combined.pieces.size() == 7 && combined.continuous();
        for (int k = 0; k <= 64; ++k) {
            const Rat mu = Rat(combined.hi()) * k / 64;
            ok = ok && combined.eval(mu) <= base.eval(mu);
        }
        ok = ok && combined.eval(rat(1232, 1137)) < base.eval(rat(1232, 1137));
        ok = ok && uniformity_threshold(params) == rat(64, 39);
        ok = ok && uniformity_threshold(ExponentParams(Rat(0))) == 2;
        check("exponents: combined bound dominates the base bound, thresholds", ok);
    }
    {
        bool ok = true;
        for (u64 d = 1; d <= 4; ++d)
            for (const Rat& t : {rat(1, 4), rat(1, 2), Rat(1), Rat(2)}) {
                const u64 n = count_M_direct(d, t);
                ok = ok && n == count_M_quadruple(d, t);
                ok = ok && 2 * n <= r_weighted_majorant(d, t);
            }
        check("hyperbolic counts: dual enumerations agree, majorant dominates", ok);
    }
    {
        bool ok = true;
        for (u64 m = 1; m <= 300; ++m)
            ok = ok && hecke_coset_reps(m).size() == sigma(m);
        for (u64 m = 1; m <= 8 && ok; ++m) {
            const auto reps = hecke_coset_reps(m);
            for (i64 a = -4; a <= 4; ++a)
                for (i64 b = -4; b <= 4; ++b)
                    for (i64 u = -4; u <= 4; ++u)
                        for (i64 v = -4; v <= 4; ++v) {
                            if (a * v - b * u != i64(m)) continue;
                            const CosetRep r = reduce_to_rep(IntMat2(a, b, u, v));
                            ok = ok && std::find(reps.begin(), reps.end(), r) != reps.end();
                        }
        }
        check("Hecke cosets: sigma(m) triangular representatives, reduction lands", ok);
    }
    {
        bool ok = true;
        for (u64 m = 1; m <= 200; ++m)
            for (double t : {0.0, 1.3, 7.7})
                ok = ok && hecke_square_relation_check(m, t, 1e-9);
        ok = ok && hecke_multiplicativity_check(3, 5, 2.2, 1e-9) &&
             hecke_multiplicativity_check(4, 9, 2.2, 1e-9) &&
             hecke_multiplicativity_check(7, 8, 2.2, 1e-9) &&
             hecke_multiplicativity_check(25, 12, 2.2, 1e-9);
        ok = ok && theta_proxy_bound_check(2000).ok;
        check("eta eigenvalues: square relation, multiplicativity, size proxy", ok);
    }
    {
        const OrbitTransferReport rep = z0_orbit_transfer();
        check("basepoint transfer: distance invariance under conjugation", rep.ok);
    }
    {
        ScanConfig cfg;
        cfg.x_points = {64, 128, 256};
        cfg.m_values = {1, 2};
        cfg.workers = 1;
        std::ostringstream a, b;
        write_records_csv(a, run_scan(cfg));
        cfg.workers = 3;
        write_records_csv(b, run_scan(cfg));
        check("scan: worker count does not change the CSV", a.str() == b.str());
    }

    if (failures == 0) {
        std::cout << "all checks passed\n";
        return 0;
    }
    std::cout << failures << " check(s) failed\n";
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact shifted convolution sums S(x,m) and their error exponents"};
    app.require_subcommand(1);

    u64 sieve_lo = 1, sieve_hi = 0;
    std::string sieve_kind = "r2", sieve_out = "table.rtb";
    unsigned sieve_workers = 1;
    auto* sieve = app.add_subcommand("sieve", "build a r2/tau table and dump it");
    sieve->add_option("--lo", sieve_lo, "first index (default 1)");
    sieve->add_option("--hi", sieve_hi, "last index")->required();
    sieve->add_option("--kind", sieve_kind, "r2 or tau")
        ->check(CLI::IsMember({"r2", "tau"}));
    sieve->add_option("--out", sieve_out, "output path");
    sieve->add_option("--workers", sieve_workers, "worker threads");

    u64 sum_x = 0, sum_m = 1;
    std::string sum_kind = "s";
    unsigned sum_workers = 1;
    auto* sum = app.add_subcommand("sum", "evaluate one sum exactly");
    sum->add_option("x", sum_x, "upper limit")->required();
    sum->add_option("m", sum_m, "shift")->required();
    sum->add_option("--kind", sum_kind, "s (r2 pairs), a (parity count), d (divisor)")
        ->check(CLI::IsMember({"s", "a", "d"}));
    sum->add_option("--workers", sum_workers, "worker threads");

    u64 mt_m = 1, mt_x = 0;
    auto* mt = app.add_subcommand("main-term", "main-term coefficient, both forms");
    mt->add_option("m", mt_m, "shift")->required();
    mt->add_option("--x", mt_x, "also evaluate at this x");

    std::string scan_config, scan_out, scan_theta = "7/64";
    unsigned scan_workers = 0;
    auto* scan = app.add_subcommand("scan", "sweep a (x, m) grid, write CSV, fit");
    scan->add_option("config", scan_config, "key=value config file (default grid if omitted)");
    scan->add_option("--out", scan_out, "override output_path");
    scan->add_option("--workers", scan_workers, "override worker count");
    scan->add_option("--theta", scan_theta, "theta p/q for the comparison column");

    std::string exp_theta = "7/64", exp_mu, exp_out, exp_table = "combined",
                exp_axis = "mu";
    auto* exp = app.add_subcommand("exponents", "piecewise error-exponent tables");
    exp->add_option("--theta", exp_theta, "subconvexity exponent p/q");
    exp->add_option("--mu", exp_mu, "evaluate at a single mu = log_x m");
    exp->add_option("--out", exp_out, "write the chosen table as CSV");
    exp->add_option("--table", exp_table, "base|window|combined|conditional")
        ->check(CLI::IsMember({"base", "window", "combined", "conditional"}));
    exp->add_option("--axis", exp_axis, "mu (m = x^mu) or alpha (m = x^(1/alpha))")
        ->check(CLI::IsMember({"mu", "alpha"}));

    u64 lat_d = 1;
    std::string lat_t = "1";
    auto* lat = app.add_subcommand("lattice", "hyperbolic disk counts at det d^2");
    lat->add_option("--d", lat_d, "scaling (determinant d^2)")->required();
    lat->add_option("--t", lat_t, "distance parameter t as p/q")->required();

    unsigned verify_workers = 4;
    auto* verify = app.add_subcommand("verify", "run the identity suite");
    verify->add_option("--workers", verify_workers, "worker threads");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*sieve) return cmd_sieve(sieve_lo, sieve_hi, sieve_kind, sieve_out, sieve_workers);
        if (*sum) return cmd_sum(sum_x, sum_m, sum_kind, sum_workers);
        if (*mt) return cmd_main_term(mt_m, mt_x);
        if (*scan)
            return cmd_scan(scan_config, scan_out, scan_workers,
                            rat_flag(scan_theta, "--theta"));
        if (*exp)
            return cmd_exponents(rat_flag(exp_theta, "--theta"), exp_mu, exp_out,
                                 exp_table, exp_axis);
        if (*lat) return cmd_lattice(lat_d, rat_flag(lat_t, "--t"));
        if (*verify) return cmd_verify(verify_workers);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
