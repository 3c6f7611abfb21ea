// Command-line front end: computes the integrity-optimal train/test split,
// tabulates the integrity curve, evaluates the asymptotic expansion,
// validates the closed forms by simulation, and benchmarks split policies
// on CSV datasets.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "splitmetric/databench.hpp"
#include "splitmetric/integrity.hpp"
#include "splitmetric/jacobi.hpp"
#include "splitmetric/montecarlo.hpp"

using nlohmann::json;
using namespace splitmetric;

namespace {

enum class Format { table, csv, jsonfmt };

Format parse_format(const std::string& name) {
    if (name == "table") return Format::table;
    if (name == "csv") return Format::csv;
    if (name == "json") return Format::jsonfmt;
    throw std::domain_error("unknown format: " + name);
}

std::string fmt_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_short(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

int resolve_threads(int flag_value) {
    if (flag_value > 0) return flag_value;
    if (const char* env = std::getenv("SPLITMETRIC_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return 0;  // library picks hardware concurrency
}

struct CommonArgs {
    long long m = 0;
    long long n = 0;
    std::string format = "table";
    int threads = 0;
};

void cmd_solve(const CommonArgs& args) {
    const SplitProblem problem{args.m, args.n};
    require_valid(problem);
    const long long p_star = optimal_p(problem);
    const double ratio = static_cast<double>(p_star) / static_cast<double>(args.m);
    const double f_star = integrity_f(problem, p_star);
    const double root = (args.m == args.n + 5)
                            ? static_cast<double>(p_star)
                            : solve_real_root(problem);
    switch (parse_format(args.format)) {
        case Format::table:
            std::cout << "p_star    " << p_star << "\n"
                      << "ratio     " << fmt_short(ratio) << "\n"
                      << "f_at_p    " << fmt_short(f_star) << "\n"
                      << "real_root " << fmt_short(root) << "\n";
            break;
        case Format::csv:
            std::cout << "p_star,ratio,f_at_p_star,real_root\n"
                      << p_star << "," << fmt_full(ratio) << "," << fmt_full(f_star)
                      << "," << fmt_full(root) << "\n";
            break;
        case Format::jsonfmt:
            std::cout << json{{"p_star", p_star},
                              {"ratio", ratio},
                              {"f_at_p_star", f_star},
                              {"real_root", root}}
                             .dump(2)
                      << "\n";
            break;
    }
}

void cmd_curve(const CommonArgs& args) {
    const IntegrityCurve curve = integrity_curve(SplitProblem{args.m, args.n});
    switch (parse_format(args.format)) {
        case Format::table:
            std::cout << "p\tf\n";
            for (const auto& [p, f] : curve.entries) {
                std::cout << p << "\t" << fmt_short(f)
                          << (p == curve.argmin_p ? "\t<- argmin" : "") << "\n";
            }
            break;
        case Format::csv:
            std::cout << "p,f\n";
            for (const auto& [p, f] : curve.entries) {
                std::cout << p << "," << fmt_full(f) << "\n";
            }
            break;
        case Format::jsonfmt: {
            json rows = json::array();
            for (const auto& [p, f] : curve.entries) rows.push_back({{"p", p}, {"f", f}});
            std::cout << json{{"argmin_p", curve.argmin_p}, {"entries", rows}}.dump(2)
                      << "\n";
            break;
        }
    }
}

void cmd_asymptotic(const CommonArgs& args, int order) {
    const SplitProblem problem{args.m, args.n};
    const double approx = asymptotic_p(problem, order);
    const double root = (args.m == args.n + 5)
                            ? static_cast<double>(optimal_p(problem))
                            : solve_real_root(problem);
    const double ratio = approx / root;
    switch (parse_format(args.format)) {
        case Format::table:
            std::cout << "expansion " << fmt_short(approx) << "\n"
                      << "exact     " << fmt_short(root) << "\n"
                      << "ratio     " << fmt_short(ratio) << "\n";
            break;
        case Format::csv:
            std::cout << "order,expansion,exact_root,ratio\n"
                      << order << "," << fmt_full(approx) << "," << fmt_full(root)
                      << "," << fmt_full(ratio) << "\n";
            break;
        case Format::jsonfmt:
            std::cout << json{{"order", order},
                              {"expansion", approx},
                              {"exact_root", root},
                              {"ratio", ratio}}
                             .dump(2)
                      << "\n";
            break;
    }
}

void cmd_simulate(const CommonArgs& args, double sigma, std::int64_t trials,
                  std::uint64_t seed) {
    SimulationConfig config;
    config.m = args.m;
    config.n = args.n;
    config.sigma = sigma;
    config.trials = trials;
    config.seed = seed;
    const ComparisonRecord record =
        empirical_vs_analytic(config, resolve_threads(args.threads));
    const long long gap = std::llabs(record.empirical_argmin - record.analytic_p);
    switch (parse_format(args.format)) {
        case Format::table:
            std::cout << "p\tmean_sq_dev\tstd_err\tanalytic_f_x_sigma4\n";
            for (const auto& row : record.rows) {
                std::cout << row.p << "\t" << fmt_short(row.normalized_mean) << "\t"
                          << fmt_short(row.std_err_normalized) << "\t"
                          << fmt_short(row.analytic_f) << "\n";
            }
            std::cout << "empirical_argmin " << record.empirical_argmin
                      << "  p_star " << record.analytic_p << "  |gap| " << gap << "\n";
            break;
        case Format::csv:
            std::cout << "p,mean_sq_dev,std_err,analytic_f\n";
            for (const auto& row : record.rows) {
                std::cout << row.p << "," << fmt_full(row.normalized_mean) << ","
                          << fmt_full(row.std_err_normalized) << ","
                          << fmt_full(row.analytic_f) << "\n";
            }
            std::cout << "# empirical_argmin=" << record.empirical_argmin
                      << " p_star=" << record.analytic_p << " gap=" << gap << "\n";
            break;
        case Format::jsonfmt: {
            json rows = json::array();
            for (const auto& row : record.rows) {
                rows.push_back({{"p", row.p},
                                {"mean_sq_dev", row.normalized_mean},
                                {"std_err", row.std_err_normalized},
                                {"analytic_f", row.analytic_f}});
            }
            std::cout << json{{"empirical_argmin", record.empirical_argmin},
                              {"p_star", record.analytic_p},
                              {"gap", gap},
                              {"per_p", rows}}
                             .dump(2)
                      << "\n";
            break;
        }
    }
}

void cmd_moments(const CommonArgs& args, long long p, std::int64_t trials,
                 std::uint64_t seed) {
    if (p < args.n + 1 || p > args.m - 1) {
        throw std::domain_error("moments require n+1 <= p <= m-1");
    }
    const JacobiParams params{static_cast<int>(args.n),
                              0.5 * static_cast<double>(p - args.n + 1),
                              0.5 * static_cast<double>(args.m - p - args.n + 1), 0.5};
    const JacobiSampler sampler(args.m, args.n, p);
    const SampledMoments sampled =
        sampled_moments(sampler.draw_many(seed, trials, resolve_threads(args.threads)));

    struct Row {
        std::string name;
        std::optional<double> closed;
        double sampled;
    };
    std::vector<Row> table;
    table.push_back({"inv_moment_1",
                     params.alpha > 1.0 ? std::optional<double>(inv_moment_1(params))
                                        : std::nullopt,
                     sampled.inv1});
    table.push_back({"inv_moment_2",
                     params.alpha > 2.0 ? std::optional<double>(inv_moment_2(params))
                                        : std::nullopt,
                     sampled.inv2});
    if (args.n >= 2) {
        table.push_back({"inv_cross_moment",
                         params.alpha > 1.0
                             ? std::optional<double>(inv_cross_moment(params))
                             : std::nullopt,
                         sampled.cross});
    }

    auto rel_err = [](double closed, double sampled_value) {
        return std::abs(sampled_value - closed) / std::abs(closed);
    };
    switch (parse_format(args.format)) {
        case Format::table:
            std::cout << "moment\tclosed_form\tsampled\trel_err\n";
            for (const auto& row : table) {
                if (row.closed) {
                    std::cout << row.name << "\t" << fmt_short(*row.closed) << "\t"
                              << fmt_short(row.sampled) << "\t"
                              << fmt_short(rel_err(*row.closed, row.sampled)) << "\n";
                } else {
                    std::cout << row.name << "\tdivergent\t" << fmt_short(row.sampled)
                              << "\t-\n";
                }
            }
            break;
        case Format::csv:
            std::cout << "moment,closed_form,sampled,rel_err\n";
            for (const auto& row : table) {
                if (row.closed) {
                    std::cout << row.name << "," << fmt_full(*row.closed) << ","
                              << fmt_full(row.sampled) << ","
                              << fmt_full(rel_err(*row.closed, row.sampled)) << "\n";
                } else {
                    std::cout << row.name << ",divergent," << fmt_full(row.sampled)
                              << ",\n";
                }
            }
            break;
        case Format::jsonfmt: {
            json rows = json::array();
            for (const auto& row : table) {
                json entry{{"moment", row.name}, {"sampled", row.sampled}};
                if (row.closed) {
                    entry["closed_form"] = *row.closed;
                    entry["rel_err"] = rel_err(*row.closed, row.sampled);
                } else {
                    entry["closed_form"] = "divergent";
                }
                rows.push_back(entry);
            }
            std::cout << rows.dump(2) << "\n";
            break;
        }
    }
}

void cmd_bench(const std::string& path, const LoadOptions& options,
               std::int64_t permutations, std::uint64_t seed,
               const std::string& format, int threads) {
    Dataset data;
    try {
        data = load_dataset(path, options);
    } catch (const std::exception& e) {
        std::cerr << "splitmetric bench: " << e.what() << "\n";
        std::exit(2);
    }
    const BenchReport report = bench_table(data, permutations, seed, resolve_threads(threads));

    switch (parse_format(format)) {
        case Format::table: {
            std::cout << "policy         p    mean_loss\n";
            for (const auto* policy : {&report.half, &report.three_quarter, &report.optimal}) {
                std::cout << policy->policy;
                for (std::size_t i = policy->policy.size(); i < 15; ++i) std::cout << ' ';
                std::cout << policy->p << "  " << fmt_short(policy->mean_loss) << "\n";
            }
            std::cout << "optimal_ratio  " << fmt_short(report.optimal_ratio) << "\n"
                      << "(m, n)         (" << report.m << ", " << report.n << ")\n";
            for (const auto& note : report.notes) std::cout << "note: " << note << "\n";
            break;
        }
        case Format::csv:
            std::cout << "policy,p,mean_loss,ratio,m,n,permutations,seed\n";
            for (const auto* policy : {&report.half, &report.three_quarter, &report.optimal}) {
                std::cout << policy->policy << "," << policy->p << ","
                          << fmt_full(policy->mean_loss) << ","
                          << fmt_full(static_cast<double>(policy->p) /
                                      static_cast<double>(report.m))
                          << "," << report.m << "," << report.n << ","
                          << report.permutations << "," << report.seed << "\n";
            }
            break;
        case Format::jsonfmt: {
            json policies = json::array();
            for (const auto* policy : {&report.half, &report.three_quarter, &report.optimal}) {
                policies.push_back({{"policy", policy->policy},
                                    {"p", policy->p},
                                    {"mean_loss", policy->mean_loss},
                                    {"ratio", static_cast<double>(policy->p) /
                                                  static_cast<double>(report.m)},
                                    {"m", report.m},
                                    {"n", report.n},
                                    {"permutations", report.permutations},
                                    {"seed", report.seed}});
            }
            json out{{"policies", policies}, {"optimal_ratio", report.optimal_ratio}};
            if (!report.notes.empty()) out["notes"] = report.notes;
            std::cout << out.dump(2) << "\n";
            break;
        }
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Integrity-optimal train/test split sizing for linear regression"};
    app.require_subcommand(1);
    app.fallthrough();  // --format / --threads may appear after the subcommand

    std::string format = "table";
    int threads = 0;
    app.add_option("--format", format, "Output format: table, csv, json")
        ->capture_default_str();
    app.add_option("--threads", threads, "Worker thread cap (0 = auto)");

    CommonArgs args;
    auto add_mn = [&](CLI::App* sub) {
        sub->add_option("--m", args.m, "Total data points")->required();
        sub->add_option("--n", args.n, "Feature dimension")->required();
    };

    auto* solve = app.add_subcommand("solve", "Optimal training size p*(m,n)");
    add_mn(solve);

    auto* curve = app.add_subcommand("curve", "Tabulate the integrity curve over p");
    add_mn(curve);

    int order = 4;
    auto* asym = app.add_subcommand("asymptotic", "Large-m expansion of the root");
    add_mn(asym);
    asym->add_option("--order", order, "Number of expansion terms, 1-4")
        ->capture_default_str();

    double sigma = 1.0;
    std::int64_t trials = 100000;
    std::uint64_t seed = 0;
    auto* sim = app.add_subcommand("simulate", "Monte Carlo check of the integrity curve");
    add_mn(sim);
    sim->add_option("--sigma", sigma, "Noise scale")->capture_default_str();
    sim->add_option("--trials", trials, "Trial count")->capture_default_str();
    sim->add_option("--seed", seed, "RNG seed")->capture_default_str();

    long long p = 0;
    auto* mom = app.add_subcommand("moments", "Closed-form vs sampled Jacobi moments");
    add_mn(mom);
    mom->add_option("--p", p, "Training size")->required();
    mom->add_option("--trials", trials, "Sample count")->capture_default_str();
    mom->add_option("--seed", seed, "RNG seed")->capture_default_str();

    std::string path;
    LoadOptions load_options;
    std::int64_t permutations = 10000;
    std::string delimiter = ",";
    auto* bench = app.add_subcommand("bench", "Permutation-loss benchmark on a CSV dataset");
    bench->add_option("path", path, "Dataset file")->required();
    bench->add_option("--target-column", load_options.target_column,
                      "Original index of the target column")
        ->capture_default_str();
    bench->add_option("--drop-columns", load_options.drop_columns,
                      "Original column indices to ignore (e.g. dates)");
    bench->add_flag("--header", load_options.header, "Skip a header row");
    bench->add_option("--missing-token", load_options.missing_token,
                      "Cell marker for missing values")
        ->capture_default_str();
    bench->add_option("--delimiter", delimiter, "Field delimiter")->capture_default_str();
    bench->add_option("--permutations", permutations, "Row permutations to average")
        ->capture_default_str();
    bench->add_option("--seed", seed, "RNG seed")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    args.format = format;
    args.threads = threads;

    try {
        if (solve->parsed()) {
            cmd_solve(args);
        } else if (curve->parsed()) {
            cmd_curve(args);
        } else if (asym->parsed()) {
            cmd_asymptotic(args, order);
        } else if (sim->parsed()) {
            if (trials < 1) throw std::domain_error("trials must be >= 1");
            cmd_simulate(args, sigma, trials, seed);
        } else if (mom->parsed()) {
            if (trials < 1) throw std::domain_error("trials must be >= 1");
            cmd_moments(args, p, trials, seed);
        } else if (bench->parsed()) {
            if (delimiter.size() != 1) {
                throw std::domain_error("delimiter must be a single character");
            }
            load_options.delimiter = delimiter[0];
            cmd_bench(path, load_options, permutations, seed, format, threads);
        }
    } catch (const std::domain_error& e) {
        std::cerr << "splitmetric: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "splitmetric: internal error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
