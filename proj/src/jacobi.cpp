#include "splitmetric/jacobi.hpp"

#include <Eigen/Dense>
#include <atomic>
#include <cmath>
#include <iostream>
#include <stdexcept>
#include <string>
#include <thread>

#include "splitmetric/rng.hpp"

namespace splitmetric {

namespace {

// The product and moment formulas are rational in beta and stay valid under
// analytic continuation to beta <= 0 (the regime p > m - n, where the test
// block is rank deficient); only the density normalization needs beta > 0.
void check_valid(const JacobiParams& params) {
    if (params.n_eigen < 1 || params.alpha <= 0.0 || params.gamma <= 0.0) {
        throw std::domain_error("JacobiParams require n_eigen >= 1 and alpha, gamma > 0");
    }
}

}  // namespace

JacobiParams params_from_split(long long m, long long n, long long p) {
    if (n < 1) throw std::domain_error("n must be >= 1");
    if (p < n + 4 || p > m - 1) {
        throw std::domain_error("p = " + std::to_string(p) +
                                " outside admissible interval [" + std::to_string(n + 4) +
                                ", " + std::to_string(m - 1) + "]");
    }
    return JacobiParams{static_cast<int>(n),
                        0.5 * static_cast<double>(p - n + 1),
                        0.5 * static_cast<double>(m - p - n + 1), 0.5};
}

double log_selberg(const JacobiParams& params) {
    check_valid(params);
    if (params.beta <= 0.0) {
        throw std::domain_error("log_selberg requires beta > 0 (integrable density)");
    }
    const double a = params.alpha, b = params.beta, g = params.gamma;
    const int n = params.n_eigen;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        sum += std::lgamma(a + i * g) + std::lgamma(b + i * g) +
               std::lgamma(1.0 + (i + 1) * g) -
               std::lgamma(a + b + (n + i - 1) * g) - std::lgamma(1.0 + g);
    }
    return sum;
}

double aomoto_product(const JacobiParams& params, int k) {
    check_valid(params);
    if (k < 0 || k > params.n_eigen) {
        throw std::domain_error("aomoto_product requires 0 <= k <= n_eigen");
    }
    const double a = params.alpha, b = params.beta, g = params.gamma;
    const int n = params.n_eigen;
    double prod = 1.0;
    for (int i = 1; i <= k; ++i) {
        prod *= (a + (n - i) * g) / (a + b + (2 * n - i - 1) * g);
    }
    return prod;
}

double inv_moment_1(const JacobiParams& params) {
    check_valid(params);
    if (params.alpha <= 1.0) {
        throw std::domain_error("<x^-1> diverges for alpha <= 1");
    }
    const double a = params.alpha, b = params.beta, g = params.gamma;
    const int n = params.n_eigen;
    return (a + b + (n - 1) * g - 1.0) / (a - 1.0);
}

double inv_moment_2(const JacobiParams& params) {
    check_valid(params);
    if (params.alpha <= 2.0) {
        throw std::domain_error("<x^-2> diverges for alpha <= 2");
    }
    const double a = params.alpha, b = params.beta, g = params.gamma;
    const int n = params.n_eigen;
    const double lead = (a + b + (n - 1) * g - 1.0) / ((a - 1.0) * (a - 2.0));
    return lead * (a + b - 2.0 + g * (n - 1) * (a + b + n * g - 1.0) / (a + g - 1.0));
}

double inv_cross_moment(const JacobiParams& params) {
    check_valid(params);
    if (params.n_eigen < 2) {
        throw std::domain_error("<x1^-1 x2^-1> needs at least two eigenvalues");
    }
    if (params.alpha <= 1.0) {
        throw std::domain_error("<x1^-1 x2^-1> diverges for alpha <= 1");
    }
    const double a = params.alpha, b = params.beta, g = params.gamma;
    const int n = params.n_eigen;
    return (a + b + (n - 1) * g - 1.0) * (a + b + n * g - 1.0) /
           ((a - 1.0) * (a + g - 1.0));
}

JacobiSampler::JacobiSampler(long long m, long long n, long long p)
    : m_(m), n_(n), p_(p) {
    if (n < 1) throw std::domain_error("n must be >= 1");
    if (p < n + 1 || p > m - 1) {
        throw std::domain_error("sampler requires n+1 <= p <= m-1");
    }
}

JacobiSample JacobiSampler::draw(std::uint64_t seed, std::uint64_t index) const {
    const auto n = static_cast<Eigen::Index>(n_);
    const auto p = static_cast<Eigen::Index>(p_);
    const auto q = static_cast<Eigen::Index>(m_ - p_);

    for (std::uint64_t attempt = 0;; ++attempt) {
        auto eng = make_engine(seed, index + (attempt << 48));
        std::normal_distribution<double> gauss(0.0, 1.0);
        Eigen::MatrixXd x(p, n), y(q, n);
        for (Eigen::Index i = 0; i < p; ++i)
            for (Eigen::Index j = 0; j < n; ++j) x(i, j) = gauss(eng);
        for (Eigen::Index i = 0; i < q; ++i)
            for (Eigen::Index j = 0; j < n; ++j) y(i, j) = gauss(eng);

        Eigen::MatrixXd xtx = x.transpose() * x;
        Eigen::MatrixXd total = xtx + y.transpose() * y;

        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(xtx, total);
        if (solver.info() != Eigen::Success) {
            std::cerr << "splitmetric: singular Jacobi draw at index " << index
                      << ", resampling\n";
            continue;
        }
        JacobiSample sample;
        sample.eigenvalues.assign(solver.eigenvalues().data(),
                                  solver.eigenvalues().data() + n);
        bool in_range = true;
        for (double ev : sample.eigenvalues) {
            if (!(ev > 0.0 && ev < 1.0)) in_range = false;
        }
        if (!in_range) {
            // Roundoff can push an eigenvalue to the closed interval boundary.
            for (double& ev : sample.eigenvalues) {
                ev = std::min(std::max(ev, 1e-300), 1.0 - 1e-16);
            }
        }
        return sample;
    }
}

std::vector<JacobiSample> JacobiSampler::draw_many(std::uint64_t seed,
                                                   std::int64_t count,
                                                   int threads) const {
    if (count < 1) throw std::domain_error("count must be >= 1");
    std::vector<JacobiSample> out(static_cast<std::size_t>(count));
    unsigned workers = threads > 0 ? static_cast<unsigned>(threads)
                                   : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(count));

    std::atomic<std::int64_t> next{0};
    auto work = [&] {
        for (;;) {
            std::int64_t i = next.fetch_add(64);
            if (i >= count) return;
            std::int64_t end = std::min(i + 64, count);
            for (; i < end; ++i) {
                out[static_cast<std::size_t>(i)] =
                    draw(seed, static_cast<std::uint64_t>(i));
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    return out;
}

SampledMoments sampled_moments(const std::vector<JacobiSample>& samples) {
    double sum1 = 0.0, sum2 = 0.0, sum_cross = 0.0;
    std::size_t count1 = 0, count_cross = 0;
    for (const auto& s : samples) {
        const std::size_t n = s.eigenvalues.size();
        double r1 = 0.0, r2 = 0.0;
        for (double ev : s.eigenvalues) {
            const double inv = 1.0 / ev;
            r1 += inv;
            r2 += inv * inv;
        }
        sum1 += r1;
        sum2 += r2;
        count1 += n;
        if (n >= 2) {
            // Sum over ordered pairs i != j of 1/(x_i x_j).
            sum_cross += r1 * r1 - r2;
            count_cross += n * (n - 1);
        }
    }
    SampledMoments m;
    m.inv1 = sum1 / static_cast<double>(count1);
    m.inv2 = sum2 / static_cast<double>(count1);
    m.cross = count_cross > 0 ? sum_cross / static_cast<double>(count_cross)
                              : std::nan("");
    return m;
}

}  // namespace splitmetric
