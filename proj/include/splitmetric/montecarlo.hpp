#ifndef SPLITMETRIC_MONTECARLO_HPP
#define SPLITMETRIC_MONTECARLO_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

namespace splitmetric {

/// Description of one end-to-end regression experiment.  When coeffs or
/// covariance are absent they are drawn from the seed (covariance as
/// G^t G + n I for well-conditioned Cholesky).
struct SimulationConfig {
    long long m = 0;
    long long n = 0;
    double sigma = 1.0;
    std::int64_t trials = 1;
    std::uint64_t seed = 0;
    std::optional<Eigen::VectorXd> coeffs;
    std::optional<Eigen::MatrixXd> covariance;
};

struct PerPEstimate {
    long long p;
    double mean_sq_dev;
    double std_err;
};

struct SimulationResult {
    std::vector<PerPEstimate> per_p;  // p from n+1 to m-1
    long long empirical_argmin;
    std::int64_t skipped_trials;  // rank-deficient draws (probability zero)
};

/// Per trial: draw X (m x n) and eps standard normal, y = XRb + sigma*eps,
/// fit on the first p rows by QR for every p in [n+1, m-1], and average
/// ((1/(m-p))||X_test R b_hat - y_test||^2 - sigma^2)^2 across trials.
/// Deterministic for a fixed seed regardless of thread count.
SimulationResult run_integrity_simulation(const SimulationConfig& config,
                                          int threads = 0);

struct TraceIdentityReport {
    double rel_err_quadratic;  // E[e^t S e]          vs tr(S)
    double rel_err_quartic;    // E[(e^t S e)^2]      vs tr(S)^2 + 2 tr(S^2)
    double rel_err_bilinear;   // E[(e^t M f)(f^t M^t e)] vs tr(M^t M)
};

/// Sampling estimates of the three Gaussian quadratic-form expectations
/// for given S (symmetric positive definite) and M.
TraceIdentityReport estimate_trace_identities(const Eigen::MatrixXd& s,
                                              const Eigen::MatrixXd& m,
                                              std::int64_t trials,
                                              std::uint64_t seed);

/// Draws one random S (a x a SPD) and M (a x b) from the seed and reports
/// the three relative errors.
TraceIdentityReport check_trace_identities(int a, int b, std::int64_t trials,
                                           std::uint64_t seed);

struct ComparisonRow {
    long long p;
    double normalized_mean;  // mean_sq_dev / sigma^4
    double std_err_normalized;
    double analytic_f;       // NaN for p below the analytic domain n+4
};

struct ComparisonRecord {
    long long empirical_argmin;
    long long analytic_p;
    std::vector<ComparisonRow> rows;
};

/// Overlays the simulated curve (normalized by sigma^4) on integrity_f.
ComparisonRecord empirical_vs_analytic(const SimulationConfig& config,
                                       int threads = 0);

}  // namespace splitmetric

#endif
