#ifndef SPLITMETRIC_INTEGRITY_HPP
#define SPLITMETRIC_INTEGRITY_HPP

#include <vector>

namespace splitmetric {

/// A dataset shape (m points, n features).  Admissible training sizes are
/// the integers in [n+4, m-1], so m >= n+5 is required.
struct SplitProblem {
    long long m;
    long long n;
};

bool is_valid(const SplitProblem& problem);
void require_valid(const SplitProblem& problem);

/// Coefficients of the quartic delta_{m,n}(p) in ascending powers of p;
/// c4 is always 1.
struct QuarticCoeffs {
    double c0, c1, c2, c3, c4;
};

struct IntegrityCurve {
    SplitProblem problem;
    std::vector<std::pair<long long, double>> entries;  // (p, f value)
    long long argmin_p;
};

/// Expected squared deviation of the per-point test loss from the noise
/// variance, divided by sigma^4.  Rational closed form:
///   (6 + m n (2+n) - (8 + n(2+n) - 2p) p) / ((m-p)(p-n-3)(p-n-1)).
/// Requires n+4 <= p <= m-1.
double integrity_f(const SplitProblem& problem, long long p);

/// The same expectation assembled from the four Jacobi negative-moment
/// terms.  Exists purely as a cross-check of integrity_f; the two routes
/// are algebraically equal.
double integrity_f_unsimplified(const SplitProblem& problem, long long p);

QuarticCoeffs quartic_coeffs(const SplitProblem& problem);

/// Horner evaluation of delta_{m,n} at real p.
double delta_eval(const SplitProblem& problem, double p);

/// The unique real root of delta_{m,n} in (n+3, m): bisection on the
/// bracketed sign change, then safeguarded Newton.
double solve_real_root(const SplitProblem& problem);

/// Integer minimizer of integrity_f: floor/ceil of the real root compared
/// by f value, clamped to [n+4, m-1]; ties go to smaller p.
long long optimal_p(const SplitProblem& problem);

/// Partial sum of the large-m expansion of the real root, truncated to
/// `order` terms (1 to 4).  The leading term alone is
/// (n(2+n))^{1/3} m^{2/3}.
double asymptotic_p(const SplitProblem& problem, int order);

IntegrityCurve integrity_curve(const SplitProblem& problem);

}  // namespace splitmetric

#endif
