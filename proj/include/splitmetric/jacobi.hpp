#ifndef SPLITMETRIC_JACOBI_HPP
#define SPLITMETRIC_JACOBI_HPP

#include <cstdint>
#include <vector>

namespace splitmetric {

/// Parameters of the Jacobi eigenvalue density
/// prod_{i<j} |x_i - x_j|^{2 gamma} prod_i x_i^{alpha-1} (1-x_i)^{beta-1}
/// on (0,1)^n.  gamma = 1/2 is the real case; the formulas accept any
/// gamma > 0.
struct JacobiParams {
    int n_eigen;
    double alpha;
    double beta;
    double gamma;
};

/// One draw from the matrix model: n_eigen eigenvalues, all strictly in (0,1).
struct JacobiSample {
    std::vector<double> eigenvalues;
};

/// Maps a split (m, n, p) to ensemble parameters:
/// alpha = (p-n+1)/2, beta = (m-p-n+1)/2, gamma = 1/2.
/// Requires n+4 <= p <= m-1 so that alpha > 2 and beta > 0.
JacobiParams params_from_split(long long m, long long n, long long p);

/// log of the Selberg normalization S_n(alpha, beta, gamma), as a sum of
/// log-gamma terms.  Only ratios of Selberg values are ever exponentiated.
double log_selberg(const JacobiParams& params);

/// Expectation of x_1 * ... * x_k, 0 <= k <= n_eigen.  k = n_eigen is
/// permitted: the product formula still equals the Selberg ratio
/// S_n(alpha+1,beta,gamma) / S_n(alpha,beta,gamma).
double aomoto_product(const JacobiParams& params, int k);

/// <x_1^-1>; requires alpha > 1.
double inv_moment_1(const JacobiParams& params);

/// <x_1^-2>; requires alpha > 2.
double inv_moment_2(const JacobiParams& params);

/// <x_1^-1 x_2^-1>; requires alpha > 1 and n_eigen >= 2.
double inv_cross_moment(const JacobiParams& params);

/// Samples eigenvalues of the Jacobi matrix model for the split (m, n, p):
/// X is p x n, Y is (m-p) x n, both i.i.d. standard normal, and the
/// eigenvalues solve the symmetric-definite problem
/// (X^t X) v = lambda (X^t X + Y^t Y) v.  The sampler only needs
/// invertibility, so the admissible range is n+1 <= p <= m-1.
/// Sample i uses a sub-seed derived from (seed, i); results are identical
/// for any parallel schedule.
class JacobiSampler {
public:
    JacobiSampler(long long m, long long n, long long p);

    JacobiSample draw(std::uint64_t seed, std::uint64_t index) const;
    std::vector<JacobiSample> draw_many(std::uint64_t seed, std::int64_t count,
                                        int threads = 0) const;

    long long m() const { return m_; }
    long long n() const { return n_; }
    long long p() const { return p_; }

private:
    long long m_, n_, p_;
};

/// Empirical averages of 1/x, 1/x^2 and 1/(x_i x_j), i != j, over a set of
/// samples; the sampling-oracle counterparts of the closed forms above.
struct SampledMoments {
    double inv1;
    double inv2;
    double cross;  // NaN when n_eigen < 2
};

SampledMoments sampled_moments(const std::vector<JacobiSample>& samples);

}  // namespace splitmetric

#endif
