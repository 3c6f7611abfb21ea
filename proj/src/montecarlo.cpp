#include "splitmetric/montecarlo.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "splitmetric/integrity.hpp"
#include "splitmetric/rng.hpp"

namespace splitmetric {

namespace {

// Counter offsets outside the trial index range, so the b / covariance
// draws never collide with per-trial streams.
constexpr std::uint64_t kCoeffsCounter = 0xC0FFEE0000000001ULL;
constexpr std::uint64_t kCovarianceCounter = 0xC0FFEE0000000002ULL;

constexpr std::int64_t kBlockSize = 256;

void fill_gaussian(Eigen::Ref<Eigen::MatrixXd> mat, std::mt19937_64& eng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (Eigen::Index i = 0; i < mat.rows(); ++i)
        for (Eigen::Index j = 0; j < mat.cols(); ++j) mat(i, j) = gauss(eng);
}

void validate(const SimulationConfig& config) {
    if (config.n < 1 || config.m < config.n + 5) {
        throw std::domain_error("simulation requires n >= 1 and m >= n + 5");
    }
    if (!(config.sigma > 0.0)) throw std::domain_error("sigma must be > 0");
    if (config.trials < 1) throw std::domain_error("trials must be >= 1");
    if (config.coeffs && config.coeffs->size() != config.n) {
        throw std::domain_error("coeffs must have length n");
    }
    if (config.covariance && (config.covariance->rows() != config.n ||
                              config.covariance->cols() != config.n)) {
        throw std::domain_error("covariance must be n x n");
    }
}

Eigen::MatrixXd cholesky_factor(const SimulationConfig& config) {
    Eigen::MatrixXd sigma_mat;
    if (config.covariance) {
        sigma_mat = *config.covariance;
    } else {
        auto eng = make_engine(config.seed, kCovarianceCounter);
        Eigen::MatrixXd g(config.n, config.n);
        fill_gaussian(g, eng);
        sigma_mat = g.transpose() * g +
                    static_cast<double>(config.n) *
                        Eigen::MatrixXd::Identity(config.n, config.n);
    }
    Eigen::LLT<Eigen::MatrixXd> llt(sigma_mat);
    if (llt.info() != Eigen::Success) {
        throw std::domain_error("covariance is not positive definite");
    }
    // y = XRb with R the upper Cholesky factor, Sigma = R^t R.
    return llt.matrixU();
}

Eigen::VectorXd true_coeffs(const SimulationConfig& config) {
    if (config.coeffs) return *config.coeffs;
    auto eng = make_engine(config.seed, kCoeffsCounter);
    Eigen::VectorXd b(config.n);
    fill_gaussian(b, eng);
    return b;
}

struct BlockSums {
    std::vector<double> sum;
    std::vector<double> sum_sq;
    std::int64_t skipped = 0;
};

}  // namespace

SimulationResult run_integrity_simulation(const SimulationConfig& config,
                                          int threads) {
    validate(config);
    const long long m = config.m, n = config.n;
    const double sigma = config.sigma;
    const Eigen::MatrixXd r = cholesky_factor(config);
    const Eigen::VectorXd b = true_coeffs(config);

    const long long p_lo = n + 1, p_hi = m - 1;
    const std::size_t np = static_cast<std::size_t>(p_hi - p_lo + 1);

    const std::int64_t nblocks = (config.trials + kBlockSize - 1) / kBlockSize;
    std::vector<BlockSums> blocks(static_cast<std::size_t>(nblocks));

    auto run_block = [&](std::int64_t block) {
        BlockSums& acc = blocks[static_cast<std::size_t>(block)];
        acc.sum.assign(np, 0.0);
        acc.sum_sq.assign(np, 0.0);
        const std::int64_t t_begin = block * kBlockSize;
        const std::int64_t t_end = std::min(t_begin + kBlockSize, config.trials);

        Eigen::MatrixXd x(m, n), z(m, n);
        Eigen::VectorXd eps(m), y(m);
        for (std::int64_t t = t_begin; t < t_end; ++t) {
            auto eng = make_engine(config.seed, static_cast<std::uint64_t>(t));
            fill_gaussian(x, eng);
            fill_gaussian(eps, eng);
            z.noalias() = x * r;
            y.noalias() = z * b;
            y += sigma * eps;

            // One (X, eps, y) draw is reused across every p in the trial.
            bool deficient = false;
            std::vector<double> vals(np);
            for (long long p = p_lo; p <= p_hi; ++p) {
                Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(z.topRows(p));
                if (qr.rank() < n) {
                    deficient = true;
                    break;
                }
                Eigen::VectorXd bhat = qr.solve(y.head(p));
                const double test_mse =
                    (z.bottomRows(m - p) * bhat - y.tail(m - p)).squaredNorm() /
                    static_cast<double>(m - p);
                const double dev = test_mse - sigma * sigma;
                vals[static_cast<std::size_t>(p - p_lo)] = dev * dev;
            }
            if (deficient) {
                ++acc.skipped;
                continue;
            }
            for (std::size_t i = 0; i < np; ++i) {
                acc.sum[i] += vals[i];
                acc.sum_sq[i] += vals[i] * vals[i];
            }
        }
    };

    unsigned workers = threads > 0 ? static_cast<unsigned>(threads)
                                   : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(nblocks));
    if (workers <= 1) {
        for (std::int64_t blk = 0; blk < nblocks; ++blk) run_block(blk);
    } else {
        std::atomic<std::int64_t> next{0};
        auto work = [&] {
            for (;;) {
                const std::int64_t blk = next.fetch_add(1);
                if (blk >= nblocks) return;
                run_block(blk);
            }
        };
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    // Blocks are combined in index order: bit-identical for any schedule.
    std::vector<double> sum(np, 0.0), sum_sq(np, 0.0);
    std::int64_t skipped = 0;
    for (const auto& blk : blocks) {
        for (std::size_t i = 0; i < np; ++i) {
            sum[i] += blk.sum[i];
            sum_sq[i] += blk.sum_sq[i];
        }
        skipped += blk.skipped;
    }

    const double count = static_cast<double>(config.trials - skipped);
    SimulationResult result;
    result.skipped_trials = skipped;
    result.per_p.reserve(np);
    result.empirical_argmin = p_lo;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < np; ++i) {
        PerPEstimate est;
        est.p = p_lo + static_cast<long long>(i);
        est.mean_sq_dev = sum[i] / count;
        const double var = std::max(0.0, sum_sq[i] / count - est.mean_sq_dev * est.mean_sq_dev);
        est.std_err = std::sqrt(var / count);
        if (est.mean_sq_dev < best) {
            best = est.mean_sq_dev;
            result.empirical_argmin = est.p;
        }
        result.per_p.push_back(est);
    }
    return result;
}

TraceIdentityReport estimate_trace_identities(const Eigen::MatrixXd& s,
                                              const Eigen::MatrixXd& m,
                                              std::int64_t trials,
                                              std::uint64_t seed) {
    if (trials < 1) throw std::domain_error("trials must be >= 1");
    if (s.rows() != s.cols() || s.rows() != m.rows()) {
        throw std::domain_error("S must be a x a and M a x b");
    }
    const Eigen::Index a = s.rows(), bdim = m.cols();

    double sum_quad = 0.0, sum_quartic = 0.0, sum_bilinear = 0.0;
    Eigen::VectorXd e(a), f(bdim);
    for (std::int64_t t = 0; t < trials; ++t) {
        auto eng = make_engine(seed, static_cast<std::uint64_t>(t));
        fill_gaussian(e, eng);
        fill_gaussian(f, eng);
        const double quad = e.dot(s * e);
        sum_quad += quad;
        sum_quartic += quad * quad;
        const double bilin = e.dot(m * f);
        sum_bilinear += bilin * bilin;
    }
    const double inv = 1.0 / static_cast<double>(trials);
    const double tr_s = s.trace();
    const double tr_s2 = (s * s).trace();
    const double tr_mtm = (m.transpose() * m).trace();

    TraceIdentityReport report;
    report.rel_err_quadratic = std::abs(sum_quad * inv - tr_s) / std::abs(tr_s);
    report.rel_err_quartic =
        std::abs(sum_quartic * inv - (tr_s * tr_s + 2.0 * tr_s2)) /
        std::abs(tr_s * tr_s + 2.0 * tr_s2);
    report.rel_err_bilinear = std::abs(sum_bilinear * inv - tr_mtm) / std::abs(tr_mtm);
    return report;
}

TraceIdentityReport check_trace_identities(int a, int b, std::int64_t trials,
                                           std::uint64_t seed) {
    if (a < 1 || b < 1) throw std::domain_error("a and b must be >= 1");
    auto eng = make_engine(seed, kCovarianceCounter);
    Eigen::MatrixXd g(a, a);
    fill_gaussian(g, eng);
    Eigen::MatrixXd s = g.transpose() * g +
                        static_cast<double>(a) * Eigen::MatrixXd::Identity(a, a);
    Eigen::MatrixXd m(a, b);
    fill_gaussian(m, eng);
    return estimate_trace_identities(s, m, trials, seed);
}

ComparisonRecord empirical_vs_analytic(const SimulationConfig& config,
                                       int threads) {
    const SimulationResult sim = run_integrity_simulation(config, threads);
    const SplitProblem problem{config.m, config.n};
    const double sigma4 = std::pow(config.sigma, 4);

    ComparisonRecord record;
    record.empirical_argmin = sim.empirical_argmin;
    record.analytic_p = optimal_p(problem);
    record.rows.reserve(sim.per_p.size());
    for (const auto& est : sim.per_p) {
        ComparisonRow row;
        row.p = est.p;
        row.normalized_mean = est.mean_sq_dev / sigma4;
        row.std_err_normalized = est.std_err / sigma4;
        row.analytic_f = est.p >= config.n + 4 ? integrity_f(problem, est.p)
                                               : std::nan("");
        record.rows.push_back(row);
    }
    return record;
}

}  // namespace splitmetric
