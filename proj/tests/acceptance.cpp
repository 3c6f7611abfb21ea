// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "splitmetric/databench.hpp"
#include "splitmetric/integrity.hpp"
#include "splitmetric/jacobi.hpp"
#include "splitmetric/montecarlo.hpp"

using namespace splitmetric;

namespace {

int failures = 0;

void report(const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] %s: %s\n", pass ? "PASS" : "FAIL", name.c_str(), detail.c_str());
    if (!pass) ++failures;
}

double round4(double x) { return std::round(x * 10000.0) / 10000.0; }

void table1_ratios() {
    struct Case {
        long long m, n;
        double ratio;
    };
    const std::vector<Case> cases = {{11934, 16, 0.2434}, {7590, 21, 0.3154},
                                     {299, 12, 0.5385},   {243, 10, 0.5267},
                                     {372, 107, 0.8871},  {165, 49, 0.8545}};
    bool pass = true;
    std::string detail;
    for (const Case& c : cases) {
        const long long p = optimal_p({c.m, c.n});
        const double ratio = round4(static_cast<double>(p) / static_cast<double>(c.m));
        if (std::abs(ratio - c.ratio) > 0.0001) {
            pass = false;
            detail += " (" + std::to_string(c.m) + "," + std::to_string(c.n) +
                      ") got " + std::to_string(ratio);
        }
    }
    if (pass) detail = "all six published ratios match to 4 decimals";
    report("table1-ratios", pass, detail);
}

void brute_force_equivalence() {
    long long mismatches = 0;
    for (long long n = 1; n <= 20; ++n) {
        for (long long m = n + 6; m <= 400; ++m) {
            const SplitProblem problem{m, n};
            long long best_p = n + 4;
            double best = integrity_f(problem, best_p);
            for (long long p = n + 4; p <= m - 1; ++p) {
                const double f = integrity_f(problem, p);
                if (f < best) {
                    best = f;
                    best_p = p;
                }
            }
            if (optimal_p(problem) != best_p) ++mismatches;
        }
    }
    report("brute-force-equivalence", mismatches == 0,
           std::to_string(mismatches) + " mismatches over n in [1,20], m in [n+6,400]");
}

void form_equivalence() {
    std::mt19937_64 eng(2024);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const long long n = 1 + static_cast<long long>(eng() % 25);
        const long long m = n + 6 + static_cast<long long>(eng() % 2000);
        const long long span = m - 1 - (n + 4) + 1;
        const long long p = n + 4 + static_cast<long long>(eng() % static_cast<std::uint64_t>(span));
        const double a = integrity_f({m, n}, p);
        const double b = integrity_f_unsimplified({m, n}, p);
        worst = std::max(worst, std::abs(a - b) / std::abs(a));
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "worst relative error %.3g", worst);
    report("form-equivalence", worst < 1e-10, buf);
}

void moment_oracle() {
    struct Case {
        long long n, p, m;
    };
    bool pass = true;
    std::string detail;
    char buf[128];
    for (const Case& c : {Case{2, 8, 20}, Case{3, 10, 30}, Case{5, 12, 40}}) {
        const JacobiParams params = params_from_split(c.m, c.n, c.p);
        const JacobiSampler sampler(c.m, c.n, c.p);
        const SampledMoments sm = sampled_moments(sampler.draw_many(1234, 100000));
        const double closed[3] = {inv_moment_1(params), inv_moment_2(params),
                                  inv_cross_moment(params)};
        const double sampled[3] = {sm.inv1, sm.inv2, sm.cross};
        for (int k = 0; k < 3; ++k) {
            const double err = std::abs(sampled[k] - closed[k]) / closed[k];
            if (err >= 0.02) {
                pass = false;
                std::snprintf(buf, sizeof buf, " (n=%lld,p=%lld,m=%lld) moment %d err %.3g",
                              c.n, c.p, c.m, k + 1, err);
                detail += buf;
            }
        }
    }
    if (pass) detail = "all nine cells within 2% at 1e5 samples";
    report("moment-oracle", pass, detail);
}

void trace_identities() {
    const TraceIdentityReport r = check_trace_identities(3, 5, 100000, 99);
    char buf[96];
    std::snprintf(buf, sizeof buf, "rel errs %.3g / %.3g / %.3g",
                  r.rel_err_quadratic, r.rel_err_quartic, r.rel_err_bilinear);
    report("trace-identities",
           r.rel_err_quadratic < 0.02 && r.rel_err_quartic < 0.02 &&
               r.rel_err_bilinear < 0.02,
           buf);
}

long long sim_argmin(double sigma, std::uint64_t seed, double* normalized_at_pstar,
                     long long* pstar) {
    SimulationConfig config;
    config.m = 40;
    config.n = 5;
    config.sigma = sigma;
    config.trials = 200000;
    config.seed = seed;
    const ComparisonRecord record = empirical_vs_analytic(config);
    if (pstar) *pstar = record.analytic_p;
    if (normalized_at_pstar) {
        for (const auto& row : record.rows) {
            if (row.p == record.analytic_p) *normalized_at_pstar = row.normalized_mean;
        }
    }
    return record.empirical_argmin;
}

void simulation_and_sigma(long long* argmin_sigma1) {
    long long pstar = 0;
    double normalized = 0.0;
    const long long argmin = sim_argmin(1.0, 7, &normalized, &pstar);
    *argmin_sigma1 = argmin;
    const double f = integrity_f({40, 5}, pstar);
    const double curve_err = std::abs(normalized - f) / f;
    char buf[128];
    std::snprintf(buf, sizeof buf,
                  "argmin %lld vs p* %lld; curve at p* off by %.2f%%",
                  argmin, pstar, 100.0 * curve_err);
    report("simulation-validates-theory",
           std::llabs(argmin - pstar) <= 3 && curve_err < 0.05, buf);
}

void sigma_invariance(long long argmin_sigma1) {
    const long long lo = sim_argmin(0.1, 7, nullptr, nullptr);
    const long long hi = sim_argmin(10.0, 7, nullptr, nullptr);
    char buf[96];
    std::snprintf(buf, sizeof buf, "argmins %lld / %lld / %lld at sigma 0.1 / 1 / 10",
                  lo, argmin_sigma1, hi);
    report("sigma-invariance",
           std::llabs(lo - argmin_sigma1) <= 3 && std::llabs(hi - argmin_sigma1) <= 3 &&
               std::llabs(lo - hi) <= 3,
           buf);
}

void asymptotics() {
    bool pass = true;
    std::string detail;
    char buf[96];
    for (long long n : {5LL, 20LL}) {
        const SplitProblem problem{1000000, n};
        const double ratio = asymptotic_p(problem, 4) / solve_real_root(problem);
        if (!(ratio > 0.999 && ratio < 1.001)) {
            pass = false;
            std::snprintf(buf, sizeof buf, " order-4 ratio %.6f at n=%lld", ratio, n);
            detail += buf;
        }
    }
    // leading term for n = 10: above 1% error at m = 1e7, below at 1e8
    auto rel_err = [](long long m) {
        const SplitProblem problem{m, 10};
        return std::abs(asymptotic_p(problem, 1) / solve_real_root(problem) - 1.0);
    };
    const double err_lo = rel_err(10000000);
    const double err_hi = rel_err(100000000);
    if (!(err_lo > 0.01 && err_hi < 0.01)) pass = false;

    // locate the crossing for the report
    long long lo = 10000000, hi = 100000000;
    while (hi - lo > 1) {
        const long long mid = lo + (hi - lo) / 2;
        (rel_err(mid) > 0.01 ? lo : hi) = mid;
    }
    std::snprintf(buf, sizeof buf,
                  "1%% threshold for n=10 near m = %.3g (expected near 2.7e7)",
                  static_cast<double>(hi));
    detail += buf;
    report("asymptotics", pass, detail);
}

void databench_properties() {
    bool pass = true;
    std::string detail;

    // noise-free recovery
    std::mt19937_64 eng(5);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Dataset data;
    data.m = 50;
    data.n = 6;
    data.features.resize(50, 6);
    Eigen::VectorXd b(6);
    for (Eigen::Index j = 0; j < 6; ++j) b(j) = gauss(eng);
    for (Eigen::Index i = 0; i < 50; ++i)
        for (Eigen::Index j = 0; j < 6; ++j) data.features(i, j) = gauss(eng);
    data.target = data.features * b;
    data.features.rowwise() -= data.features.colwise().mean();
    data.target.array() -= data.target.mean();
    const double scale = data.target.squaredNorm() / 50.0;
    const double loss = permutation_loss(data, 25, 100, 3);
    if (!(loss < 1e-12 * scale)) {
        pass = false;
        detail += " noise-free loss too large;";
    }

    // byte-exact seed determinism
    const Dataset noisy = [&] {
        Dataset d = data;
        for (Eigen::Index i = 0; i < 50; ++i) d.target(i) += gauss(eng);
        d.target.array() -= d.target.mean();
        return d;
    }();
    if (permutation_loss(noisy, 25, 500, 11, 1) != permutation_loss(noisy, 25, 500, 11, 4)) {
        pass = false;
        detail += " seed determinism broken;";
    }

    // hand-computed imputation + centering
    const Dataset tiny = build_dataset(
        {{"1", "10"}, {"?", "20"}, {"3", "30"}}, LoadOptions{1}, "<acceptance>");
    if (std::abs(tiny.features(0, 0) + 1.0) > 1e-12 ||
        std::abs(tiny.features(1, 0)) > 1e-12 ||
        std::abs(tiny.features(2, 0) - 1.0) > 1e-12) {
        pass = false;
        detail += " imputation/centering mismatch;";
    }
    if (pass) detail = "noise-free loss, determinism, and preprocessing all check out";
    report("databench-properties", pass, detail);
}

}  // namespace

int main() {
    const auto start = std::chrono::steady_clock::now();
    table1_ratios();
    brute_force_equivalence();
    form_equivalence();
    moment_oracle();
    trace_identities();
    long long argmin_sigma1 = 0;
    simulation_and_sigma(&argmin_sigma1);
    sigma_invariance(argmin_sigma1);
    asymptotics();
    databench_properties();
    const auto elapsed = std::chrono::duration_cast<std::chrono::seconds>(
                             std::chrono::steady_clock::now() - start)
                             .count();
    std::printf("%d criteria failed (total %llds)\n", failures,
                static_cast<long long>(elapsed));
    return failures == 0 ? 0 : 1;
}
