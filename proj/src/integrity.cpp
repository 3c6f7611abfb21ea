#include "splitmetric/integrity.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "splitmetric/jacobi.hpp"

namespace splitmetric {

namespace {

void check_p_range(const SplitProblem& problem, long long p) {
    if (p < problem.n + 4 || p > problem.m - 1) {
        throw std::domain_error("p = " + std::to_string(p) +
                                " outside admissible interval [" +
                                std::to_string(problem.n + 4) + ", " +
                                std::to_string(problem.m - 1) + "]");
    }
}

// Coefficients built in extended precision; they reach O(m^2 n^3) and the
// root refinement cancels the two largest terms against each other.
struct QuarticL {
    long double c0, c1, c2, c3, c4;

    long double eval(long double p) const {
        return (((c4 * p + c3) * p + c2) * p + c1) * p + c0;
    }
    long double deriv(long double p) const {
        return ((4.0L * c4 * p + 3.0L * c3) * p + 2.0L * c2) * p + c1;
    }
};

QuarticL quartic_long(const SplitProblem& problem) {
    const long double m = static_cast<long double>(problem.m);
    const long double n = static_cast<long double>(problem.n);
    QuarticL q;
    q.c0 = 9.0L + n * (m * m * (2.0L + n) * (2.0L + n) + 3.0L * (4.0L + n) -
                       2.0L * m * (5.0L + 2.0L * n));
    q.c1 = -24.0L - n * (12.0L + m * m * (2.0L + n) + 2.0L * m * n * (3.0L + n));
    q.c2 = 22.0L + n * (8.0L + 2.0L * m * (1.0L + n) + n * (3.0L + n));
    q.c3 = -(8.0L + n * (2.0L + n));
    q.c4 = 1.0L;
    return q;
}

}  // namespace

bool is_valid(const SplitProblem& problem) {
    return problem.n >= 1 && problem.m >= problem.n + 5;
}

void require_valid(const SplitProblem& problem) {
    if (!is_valid(problem)) {
        throw std::domain_error("split problem requires n >= 1 and m >= n + 5 (got m = " +
                                std::to_string(problem.m) + ", n = " +
                                std::to_string(problem.n) + ")");
    }
}

double integrity_f(const SplitProblem& problem, long long p) {
    require_valid(problem);
    check_p_range(problem, p);
    const double m = static_cast<double>(problem.m);
    const double n = static_cast<double>(problem.n);
    const double pd = static_cast<double>(p);
    const double numer = 6.0 + m * n * (2.0 + n) - (8.0 + n * (2.0 + n) - 2.0 * pd) * pd;
    const double denom = (m - pd) * (pd - n - 3.0) * (pd - n - 1.0);
    return numer / denom;
}

double integrity_f_unsimplified(const SplitProblem& problem, long long p) {
    require_valid(problem);
    check_p_range(problem, p);
    const JacobiParams params = params_from_split(problem.m, problem.n, p);
    const double n = static_cast<double>(problem.n);
    const double mp = static_cast<double>(problem.m - p);
    double sum = 3.0 * n * inv_moment_2(params) -
                 2.0 * n * n * inv_moment_1(params) + n * n - 2.0 * n + 2.0 * mp;
    if (problem.n >= 2) {
        sum += n * (n - 1.0) * inv_cross_moment(params);
    }
    return sum / (mp * mp);
}

QuarticCoeffs quartic_coeffs(const SplitProblem& problem) {
    require_valid(problem);
    const QuarticL q = quartic_long(problem);
    return QuarticCoeffs{static_cast<double>(q.c0), static_cast<double>(q.c1),
                         static_cast<double>(q.c2), static_cast<double>(q.c3),
                         static_cast<double>(q.c4)};
}

double delta_eval(const SplitProblem& problem, double p) {
    require_valid(problem);
    return static_cast<double>(quartic_long(problem).eval(static_cast<long double>(p)));
}

double solve_real_root(const SplitProblem& problem) {
    require_valid(problem);
    const QuarticL q = quartic_long(problem);
    const long double left = static_cast<long double>(problem.n) + 3.0L;
    const long double right = static_cast<long double>(problem.m);
    const long double width = right - left;

    // delta is negative just right of p = n+3 (f decreases away from the
    // pole) and positive approaching p = m.
    long double lo = left + 1e-9L * width;
    long double hi = right - 1e-9L * width;
    for (int i = 0; i < 60 && q.eval(lo) >= 0.0L; ++i) lo = left + (lo - left) * 0.5L;
    for (int i = 0; i < 60 && q.eval(hi) <= 0.0L; ++i) hi = right - (right - hi) * 0.5L;
    if (!(q.eval(lo) < 0.0L && q.eval(hi) > 0.0L)) {
        throw std::runtime_error("no admissible root of delta in (n+3, m)");
    }

    for (int i = 0; i < 200 && hi - lo > 1e-16L * hi; ++i) {
        const long double mid = 0.5L * (lo + hi);
        if (q.eval(mid) < 0.0L) lo = mid; else hi = mid;
    }

    // Newton polish, kept inside the bracket.
    long double p = 0.5L * (lo + hi);
    for (int i = 0; i < 8; ++i) {
        const long double d = q.deriv(p);
        if (d == 0.0L) break;
        long double step = q.eval(p) / d;
        long double next = p - step;
        if (next <= lo || next >= hi) break;
        p = next;
        if (std::abs(step) <= 1e-15L * p) break;
    }
    return static_cast<double>(p);
}

long long optimal_p(const SplitProblem& problem) {
    require_valid(problem);
    const long long lo = problem.n + 4;
    const long long hi = problem.m - 1;
    if (lo == hi) return lo;  // single-point range, no root solve needed

    const double root = solve_real_root(problem);
    long long a = static_cast<long long>(std::floor(root));
    long long b = a + 1;
    a = std::min(std::max(a, lo), hi);
    b = std::min(std::max(b, lo), hi);
    if (a == b) return a;
    const double fa = integrity_f(problem, a);
    const double fb = integrity_f(problem, b);
    return fb < fa ? b : a;
}

double asymptotic_p(const SplitProblem& problem, int order) {
    require_valid(problem);
    if (order < 1 || order > 4) {
        throw std::domain_error("expansion order must be in [1, 4]");
    }
    const double m = static_cast<double>(problem.m);
    const double n = static_cast<double>(problem.n);
    const double s = std::cbrt(n * (2.0 + n));
    double value = std::cbrt(m) * std::cbrt(m) * s;
    if (order >= 2) value -= std::cbrt(m) * 2.0 * n * (1.0 + n) / (3.0 * s);
    if (order >= 3) value += (6.0 + n + n * n) / 3.0;
    if (order >= 4) {
        const double s5 = s * s * s * s * s;
        value -= (1.0 / std::cbrt(m)) * 2.0 * n * n *
                 (216.0 + n * (230.0 + n * (87.0 + n * (24.0 + 5.0 * n)))) /
                 (81.0 * s5);
    }
    return value;
}

IntegrityCurve integrity_curve(const SplitProblem& problem) {
    require_valid(problem);
    IntegrityCurve curve;
    curve.problem = problem;
    curve.argmin_p = problem.n + 4;
    double best = integrity_f(problem, curve.argmin_p);
    for (long long p = problem.n + 4; p <= problem.m - 1; ++p) {
        const double f = integrity_f(problem, p);
        curve.entries.emplace_back(p, f);
        if (f < best) {
            best = f;
            curve.argmin_p = p;
        }
    }
    return curve;
}

}  // namespace splitmetric
