#include "uplink/specfun.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <sstream>

namespace uplink {

void QuadratureSpec::validate() const
{
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
        throw DomainError("quadrature tolerances must be positive");
    if (max_subdivisions < 1)
        throw DomainError("quadrature needs at least one subdivision");
}

namespace {

// 15-point Kronrod nodes (non-negative half) and weights, with the embedded
// 7-point Gauss weights on the odd nodes.
constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a;
    double b;
    double value;
    double error;
    bool operator<(const Segment& other) const { return error < other.error; }
};

Segment gauss_kronrod_15(const Integrand& f, double a, double b)
{
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod = fc * kKronrodWeights[7];
    double gauss = fc * kGaussWeights[3];
    double abs_sum = std::abs(kronrod);
    std::array<double, 7> f1{};
    std::array<double, 7> f2{};
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kKronrodNodes[j];
        f1[j] = f(center - dx);
        f2[j] = f(center + dx);
        const double pair = f1[j] + f2[j];
        kronrod += kKronrodWeights[j] * pair;
        abs_sum += kKronrodWeights[j] * (std::abs(f1[j]) + std::abs(f2[j]));
        if (j % 2 == 1)
            gauss += kGaussWeights[j / 2] * pair;
    }
    const double mean = 0.5 * kronrod;
    double asc = kKronrodWeights[7] * std::abs(fc - mean);
    for (int j = 0; j < 7; ++j)
        asc += kKronrodWeights[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));

    const double scale = std::abs(half);
    const double result = kronrod * half;
    asc *= scale;
    abs_sum *= scale;
    double err = std::abs((kronrod - gauss) * half);
    if (asc != 0.0 && err != 0.0)
        err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (abs_sum > std::numeric_limits<double>::min() / (50.0 * eps))
        err = std::max(50.0 * eps * abs_sum, err);
    return {a, b, result, err};
}

} // namespace

QuadratureResult integrate(const Integrand& f, double a, double b, const QuadratureSpec& spec)
{
    spec.validate();
    if (a == b)
        return {};
    std::priority_queue<Segment> heap;
    Segment first = gauss_kronrod_15(f, a, b);
    double total = first.value;
    double total_err = first.error;
    heap.push(first);
    int subdivisions = 1;
    auto converged = [&] { return total_err <= std::max(spec.abs_tol, spec.rel_tol * std::abs(total)); };
    while (!converged()) {
        if (subdivisions >= spec.max_subdivisions) {
            std::ostringstream os;
            os.precision(6);
            os << "quadrature did not converge in " << spec.max_subdivisions
               << " subdivisions (estimate " << total << ", error " << total_err << ")";
            throw QuadratureError(os.str(), total, total_err);
        }
        const Segment worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        const Segment left = gauss_kronrod_15(f, worst.a, mid);
        const Segment right = gauss_kronrod_15(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++subdivisions;
    }
    // Re-add from the segments to shed the drift of incremental updates.
    double sum = 0.0;
    double err = 0.0;
    while (!heap.empty()) {
        sum += heap.top().value;
        err += heap.top().error;
        heap.pop();
    }
    return {sum, err, subdivisions};
}

QuadratureResult integrate_semiinfinite(const Integrand& f, const QuadratureSpec& spec)
{
    const Integrand mapped = [&f](double u) {
        const double one_minus = 1.0 - u;
        return f(u / one_minus) / (one_minus * one_minus);
    };
    return integrate(mapped, 0.0, 1.0, spec);
}

double lower_incomplete_gamma(double a, double b)
{
    if (!(a > 0.0) || !(b >= 0.0) || !std::isfinite(a) || std::isnan(b))
        throw DomainError("lower incomplete gamma needs a > 0 and b >= 0");
    if (b == 0.0)
        return 0.0;
    if (std::isinf(b))
        return std::tgamma(a);
    constexpr double eps = std::numeric_limits<double>::epsilon();
    const double log_prefactor = a * std::log(b) - b;
    if (b < a + 1.0) {
        double del = 1.0 / a;
        double sum = del;
        for (int n = 1; n < 10000; ++n) {
            del *= b / (a + n);
            sum += del;
            if (std::abs(del) < std::abs(sum) * eps)
                break;
        }
        return sum * std::exp(log_prefactor);
    }
    // Upper tail by modified Lentz continued fraction, then gamma(a) - Gamma(a, b).
    constexpr double tiny = 1e-300;
    double bb = b + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / bb;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -i * (i - a);
        bb += 2.0;
        d = an * d + bb;
        if (std::abs(d) < tiny)
            d = tiny;
        c = bb + an / c;
        if (std::abs(c) < tiny)
            c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < eps)
            break;
    }
    return std::tgamma(a) - std::exp(log_prefactor) * h;
}

double interference_exponent_integral(double theta_k, double alpha)
{
    if (!(alpha > 2.0) || !std::isfinite(alpha))
        throw DomainError("interference integral diverges unless alpha > 2");
    if (!(theta_k >= 0.0) || !std::isfinite(theta_k))
        throw DomainError("interference integral needs a finite theta >= 0");
    if (theta_k == 0.0)
        return 0.0;
    // y = u^(-1/(alpha-2)) turns the tail integral into
    // (1/(alpha-2)) int_0^U du / (1 + u^q), U = theta^((alpha-2)/alpha), q = alpha/(alpha-2).
    const double upper = std::pow(theta_k, (alpha - 2.0) / alpha);
    const double q = alpha / (alpha - 2.0);
    const Integrand f = [q](double u) { return 1.0 / (1.0 + std::pow(u, q)); };
    QuadratureSpec spec;
    spec.rel_tol = 1e-13;
    spec.abs_tol = std::numeric_limits<double>::min();
    spec.max_subdivisions = 2000;
    return integrate(f, 0.0, upper, spec).value / (alpha - 2.0);
}

double interference_exponent(double theta_k, double alpha)
{
    if (theta_k == 0.0)
        return 0.0;
    return std::pow(theta_k, 2.0 / alpha) * interference_exponent_integral(theta_k, alpha);
}

double gauss_2f1_special(double theta_k, double alpha)
{
    if (!(alpha > 2.0) || !std::isfinite(alpha))
        throw DomainError("hypergeometric family needs alpha > 2");
    if (!(theta_k >= 0.0) || !std::isfinite(theta_k))
        throw DomainError("hypergeometric argument must be finite and non-negative");
    return gauss_2f1_special_t<double>(theta_k, alpha);
}

Extended binomial_extended(int n, int k)
{
    if (k < 0 || k > n)
        return Extended(0);
    k = std::min(k, n - k);
    Extended c = 1;
    for (int i = 1; i <= k; ++i)
        c = c * (n - k + i) / i;
    return c;
}

AlternatingSum alternating_binomial_sum_double(std::span<const double> terms, double term_rel_error)
{
    const int n = static_cast<int>(terms.size());
    if (n < 1)
        throw DomainError("alternating binomial sum needs n >= 1");
    constexpr double eps = std::numeric_limits<double>::epsilon();
    // Neumaier compensated summation.
    double sum = 0.0;
    double comp = 0.0;
    double magnitude = 0.0;
    double coeff = 1.0;
    for (int k = 1; k <= n; ++k) {
        coeff = coeff * (n - k + 1) / k;
        const double x = (k % 2 == 1 ? 1.0 : -1.0) * coeff * terms[k - 1];
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
        magnitude += coeff * std::abs(terms[k - 1]);
    }
    const double value = sum + comp;
    const double bound = magnitude * (term_rel_error + 2.0 * eps) + 2.0 * eps * std::abs(value);
    return {value, bound, false};
}

AlternatingSum alternating_binomial_sum_extended(std::span<const Extended> terms)
{
    const int n = static_cast<int>(terms.size());
    if (n < 1)
        throw DomainError("alternating binomial sum needs n >= 1");
    Extended sum = 0;
    Extended magnitude = 0;
    Extended coeff = 1;
    for (int k = 1; k <= n; ++k) {
        coeff = coeff * (n - k + 1) / k;
        const Extended x = coeff * terms[k - 1];
        if (k % 2 == 1)
            sum += x;
        else
            sum -= x;
        magnitude += abs(x);
    }
    // Terms are assumed accurate to a few units of the extended epsilon.
    const Extended bound = magnitude * std::numeric_limits<Extended>::epsilon() * 64;
    return {sum.convert_to<double>(), bound.convert_to<double>(), true};
}

namespace {

double certify(const AlternatingSum& s)
{
    if (!(s.error_bound <= kCancellationTolerance)) {
        std::ostringstream os;
        os << "alternating binomial sum lost precision (error bound " << s.error_bound << ")";
        throw PrecisionError(os.str(), s.error_bound);
    }
    return std::clamp(s.value, 0.0, 1.0);
}

} // namespace

double alternating_binomial_sum(int n, const std::function<double(int)>& term)
{
    if (n < 1)
        throw DomainError("alternating binomial sum needs n >= 1");
    std::vector<double> terms(n);
    for (int k = 1; k <= n; ++k)
        terms[k - 1] = term(k);
    return certify(alternating_binomial_sum_double(terms));
}

double alternating_binomial_sum(int n, const std::function<double(int)>& term,
                                const std::function<Extended(int)>& exact, double term_rel_error)
{
    if (n < 1)
        throw DomainError("alternating binomial sum needs n >= 1");
    if (n <= kDirectSumMaxN) {
        std::vector<double> terms(n);
        for (int k = 1; k <= n; ++k)
            terms[k - 1] = term(k);
        const AlternatingSum direct = alternating_binomial_sum_double(terms, term_rel_error);
        if (direct.error_bound <= kCancellationTolerance)
            return std::clamp(direct.value, 0.0, 1.0);
    }
    std::vector<Extended> terms(n);
    for (int k = 1; k <= n; ++k)
        terms[k - 1] = exact(k);
    return certify(alternating_binomial_sum_extended(terms));
}

} // namespace uplink
