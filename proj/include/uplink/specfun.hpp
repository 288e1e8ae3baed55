#pragma once

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace uplink {

/// Fixed-precision MPFR float with `Digits` significant decimal digits.
template <unsigned Digits>
using Precise = boost::multiprecision::number<
    boost::multiprecision::mpfr_float_backend<Digits, boost::multiprecision::allocate_stack>,
    boost::multiprecision::et_off>;

/// 50 significant decimal digits, used where binomial cancellation eats double precision.
using Extended = Precise<50>;

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Adaptive quadrature ran out of subdivisions before meeting its tolerance.
class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, double estimate, double error)
        : std::runtime_error(what), estimate(estimate), error(error) {}
    double estimate;
    double error;
};

/// The alternating binomial sum could not certify its absolute error.
class PrecisionError : public std::runtime_error {
public:
    PrecisionError(const std::string& what, double error_bound)
        : std::runtime_error(what), error_bound(error_bound) {}
    double error_bound;
};

struct QuadratureSpec {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    int max_subdivisions = 200;

    void validate() const;
};

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    int subdivisions = 0;
};

using Integrand = std::function<double(double)>;

/// Globally adaptive Gauss-Kronrod (7/15) on [a, b].
QuadratureResult integrate(const Integrand& f, double a, double b, const QuadratureSpec& spec = {});

/// Integral over (0, inf) through x = u / (1 - u), u in (0, 1).
QuadratureResult integrate_semiinfinite(const Integrand& f, const QuadratureSpec& spec = {});

/// gamma(a, b) = int_0^b t^(a-1) e^(-t) dt.
double lower_incomplete_gamma(double a, double b);

/// J(theta) = int_{theta^(-1/alpha)}^inf y / (y^alpha + 1) dy, by quadrature.
double interference_exponent_integral(double theta_k, double alpha);

/// theta^(2/alpha) * J(theta); the quantity that multiplies the interferer density
/// in the Laplace exponent. Quadrature route.
double interference_exponent(double theta_k, double alpha);

namespace detail {

// sum_{n>=0} n! / (c)_n * w^n for 0 <= w <= 1/2.
template <class Real>
Real pfaff_series(const Real& c, const Real& w)
{
    const Real eps = std::numeric_limits<Real>::epsilon();
    Real term = 1;
    Real sum = 1;
    for (int n = 1; n < 4000; ++n) {
        term *= Real(n) / (c + Real(n - 1)) * w;
        sum += term;
        if (term < eps * sum)
            break;
    }
    return sum;
}

} // namespace detail

/// 2F1(1, 1 - 2/alpha; 2 - 2/alpha; -theta_k) for theta_k >= 0.
///
/// theta <= 1 uses the Pfaff transform with argument theta / (1 + theta); theta > 1
/// uses the 1/z continuation, whose remaining series is again Pfaff-transformed, so
/// every series runs with ratio at most 1/2.
template <class Real>
Real gauss_2f1_special_t(const Real& theta_k, const Real& alpha)
{
    using std::pow;
    using std::sin;
    const Real b = Real(1) - Real(2) / alpha;
    if (theta_k == 0)
        return Real(1);
    if (theta_k <= 1) {
        const Real w = theta_k / (Real(1) + theta_k);
        return detail::pfaff_series(b + Real(1), w) / (Real(1) + theta_k);
    }
    const Real pi = boost::math::constants::pi<Real>();
    const Real head = b * pow(theta_k, -b) * pi / sin(pi * b);
    const Real w = Real(1) / (Real(1) + theta_k);
    const Real tail = b / ((Real(1) - b) * (Real(1) + theta_k)) * detail::pfaff_series(Real(2) - b, w);
    return head - tail;
}

double gauss_2f1_special(double theta_k, double alpha);

/// theta * 2F1(...) / (alpha - 2); equal to theta^(2/alpha) J(theta). Series route,
/// usable at any precision.
template <class Real>
Real interference_exponent_series(const Real& theta_k, const Real& alpha)
{
    return theta_k * gauss_2f1_special_t(theta_k, alpha) / (alpha - Real(2));
}

/// Absolute error the alternating binomial sum must certify.
inline constexpr double kCancellationTolerance = 1e-9;
/// Above this n the double path is not attempted.
inline constexpr int kDirectSumMaxN = 25;

struct AlternatingSum {
    double value = 0.0;
    double error_bound = 0.0;
    bool extended = false;
};

/// sum_{k=1}^n C(n,k) (-1)^(k+1) terms[k-1] in compensated double arithmetic.
/// term_rel_error is the relative accuracy of the supplied terms.
AlternatingSum alternating_binomial_sum_double(std::span<const double> terms,
                                               double term_rel_error = 2 * std::numeric_limits<double>::epsilon());

/// Same sum with exact binomial coefficients and extended partial sums.
AlternatingSum alternating_binomial_sum_extended(std::span<const Extended> terms);

/// Double-only evaluation; throws PrecisionError when cancellation cannot be certified.
double alternating_binomial_sum(int n, const std::function<double(int)>& term);

/// Tries the double path for n <= kDirectSumMaxN and falls back to `exact` otherwise.
double alternating_binomial_sum(int n, const std::function<double(int)>& term,
                                const std::function<Extended(int)>& exact,
                                double term_rel_error = 2 * std::numeric_limits<double>::epsilon());

/// Exact C(n, k) in extended precision (n up to a few hundred).
Extended binomial_extended(int n, int k);

} // namespace uplink
