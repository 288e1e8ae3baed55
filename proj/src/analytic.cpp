#include "uplink/analytic.hpp"

#include "uplink/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace uplink {

std::string to_string(Provenance p)
{
    switch (p) {
    case Provenance::AnalyticVoronoi: return "analytic-1";
    case Provenance::AnalyticRange: return "analytic-2";
    case Provenance::AnalyticEmpirical: return "analytic-empirical";
    case Provenance::Simulated: return "sim";
    }
    return "unknown";
}

Provenance analytic_provenance(UserCountKind kind)
{
    switch (kind) {
    case UserCountKind::VoronoiCell: return Provenance::AnalyticVoronoi;
    case UserCountKind::AchievableRange: return Provenance::AnalyticRange;
    case UserCountKind::Empirical: return Provenance::AnalyticEmpirical;
    }
    return Provenance::AnalyticEmpirical;
}

bool CcdfCurve::non_increasing() const
{
    for (std::size_t i = 1; i < points.size(); ++i)
        if (points[i].theta >= points[i - 1].theta && points[i].prob > points[i - 1].prob)
            return false;
    return true;
}

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
// Relative accuracy credited to the quadrature interference exponent.
constexpr double kExponentRelError = 1e-13;

// gamma(2, x) / (1 - e^-x), -> 0 as x -> 0.
double truncation_ratio(double x)
{
    if (x == 0.0)
        return 0.0;
    return lower_incomplete_gamma(2.0, x) / -std::expm1(-x);
}

double validated_f0(double fN0)
{
    if (!(fN0 >= 0.0 && fN0 <= 1.0))
        throw DomainError("f_N(0) must lie in [0, 1]");
    return fN0;
}

struct PreciseSum {
    double value = 0.0;
    double error_bound = 0.0;
};

// sum_k (-1)^(k+1) W_k T_k with W_k = sum_n f(n) C(n, k), all in Real arithmetic. The
// binomial rows are built by Pascal's rule, which is exact while the entries fit in the
// mantissa.
template <class Real>
PreciseSum precise_alternating(const std::vector<double>& f, double theta, double alpha, double noise_slope,
                               double coeff)
{
    const int n_max = static_cast<int>(f.size()) - 1;
    std::vector<Real> row(n_max + 1, Real(0));
    std::vector<Real> weight(n_max + 1, Real(0));
    row[0] = 1;
    for (int n = 1; n <= n_max; ++n) {
        for (int k = n; k >= 1; --k)
            row[k] += row[k - 1];
        if (f[n] == 0.0)
            continue;
        const Real fn(f[n]);
        for (int k = 1; k <= n; ++k)
            weight[k] += fn * row[k];
    }
    const Real th(theta);
    const Real al(alpha);
    const Real slope(noise_slope);
    const Real cf(coeff);
    Real sum = 0;
    Real magnitude = 0;
    double max_exponent = 0.0;
    for (int k = 1; k <= n_max; ++k) {
        if (weight[k] == 0)
            continue;
        Real e = Real(k) * slope;
        if (coeff != 0.0)
            e += cf * interference_exponent_series(Real(k) * th, al);
        max_exponent = std::max(max_exponent, e.template convert_to<double>());
        const Real x = weight[k] * exp(-e);
        if (k % 2 == 1)
            sum += x;
        else
            sum -= x;
        magnitude += x;
    }
    // Each term carries a few units of rounding in the series and in exp, amplified by
    // the size of the exponent.
    const Real bound = magnitude * std::numeric_limits<Real>::epsilon() * (64.0 + 16.0 * max_exponent);
    return {sum.template convert_to<double>(), bound.template convert_to<double>()};
}

// exp(-k*theta*sigma^2/rho) * L_I(k*theta/rho) for k = 1, 2, ..., memoized in double
// precision, with a multiprecision path for sums the double terms cannot certify.
class TermTable {
public:
    TermTable(double theta, const NetworkParams& p, double fN0, bool interference_limited)
        : theta_(theta), alpha_(p.alpha()),
          noise_slope_(interference_limited ? 0.0 : theta * p.noise_power() / p.rho_target()),
          coeff_(interferer_coefficient(p, fN0))
    {
    }

    double exponent(int k)
    {
        grow(k);
        return exponents_[k - 1];
    }

    double term(int k) { return std::exp(-exponent(k)); }

    double term_rel_error(int k) { return exponent(k) * kExponentRelError + 2.0 * kEps; }

    // P(SINR > theta | n).
    double conditional(int n)
    {
        if (n <= 0)
            return 0.0;
        if (n <= kDirectSumMaxN) {
            std::vector<double> terms(n);
            double rel = 0.0;
            for (int k = 1; k <= n; ++k) {
                terms[k - 1] = term(k);
                rel = std::max(rel, term_rel_error(k));
            }
            const AlternatingSum direct = alternating_binomial_sum_double(terms, rel);
            if (direct.error_bound <= kCancellationTolerance)
                return std::clamp(direct.value, 0.0, 1.0);
        }
        std::vector<double> delta(n + 1, 0.0);
        delta[n] = 1.0;
        return std::clamp(precise(delta), 0.0, 1.0);
    }

    // sum_n f(n) P(SINR > theta | n) for f = f(0..n_max).
    double marginal(const std::vector<double>& f)
    {
        const int n_max = static_cast<int>(f.size()) - 1;
        if (n_max < 1)
            return 0.0;
        // sum_k (-1)^(k+1) E[C(N,k)] T_k in double precision stays well conditioned when
        // the mean user count is small.
        const std::vector<double> log_w = log_weights(f);
        double sum = 0.0;
        double comp = 0.0;
        double bound = 0.0;
        for (int k = 1; k <= n_max; ++k) {
            if (std::isinf(log_w[k]))
                continue;
            const double weight = std::exp(log_w[k]);
            const double t = term(k);
            const double x = (k % 2 == 1 ? 1.0 : -1.0) * weight * t;
            const double s = sum + x;
            comp += std::abs(sum) >= std::abs(x) ? (sum - s) + x : (x - s) + sum;
            sum = s;
            bound += weight * t * (term_rel_error(k) + 64.0 * kEps);
            if (bound > kCancellationTolerance)
                break;
        }
        if (bound <= kCancellationTolerance)
            return sum + comp;
        return precise(f);
    }

private:
    // log E[C(N, k)] for k = 0..n_max; -inf where the weight vanishes.
    static std::vector<double> log_weights(const std::vector<double>& f)
    {
        const int n_max = static_cast<int>(f.size()) - 1;
        std::vector<double> out(n_max + 1, -std::numeric_limits<double>::infinity());
        for (int k = 0; k <= n_max; ++k) {
            double peak = -std::numeric_limits<double>::infinity();
            std::vector<double> logs;
            for (int n = k; n <= n_max; ++n) {
                if (!(f[n] > 0.0))
                    continue;
                logs.push_back(std::log(f[n]) + std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
                peak = std::max(peak, logs.back());
            }
            if (logs.empty())
                continue;
            double acc = 0.0;
            for (double l : logs)
                acc += std::exp(l - peak);
            out[k] = peak + std::log(acc);
        }
        return out;
    }

    // Multiprecision evaluation at the smallest precision tier whose error bound meets
    // the cancellation tolerance.
    double precise(const std::vector<double>& f)
    {
        const int n_max = static_cast<int>(f.size()) - 1;
        const std::vector<double> log_w = log_weights(f);
        double log10_magnitude = -std::numeric_limits<double>::infinity();
        double max_exponent = 0.0;
        for (int k = 1; k <= n_max; ++k) {
            if (std::isinf(log_w[k]))
                continue;
            log10_magnitude = std::max(log10_magnitude, (log_w[k] - exponent(k)) / std::numbers::ln10);
            max_exponent = std::max(max_exponent, exponent(k));
        }
        if (std::isinf(log10_magnitude))
            return 0.0;
        const double needed = log10_magnitude + std::log10(n_max * (64.0 + 16.0 * max_exponent)) -
                              std::log10(kCancellationTolerance) + 2.0;
        PreciseSum result{0.0, std::numeric_limits<double>::infinity()};
        auto attempt = [&](auto tag, double digits) {
            using Real = decltype(tag);
            if (result.error_bound <= kCancellationTolerance || digits < needed)
                return;
            result = precise_alternating<Real>(f, theta_, alpha_, noise_slope_, coeff_);
        };
        attempt(Precise<50>{}, 50.0);
        attempt(Precise<100>{}, 100.0);
        attempt(Precise<200>{}, 200.0);
        attempt(Precise<400>{}, 400.0);
        if (!(result.error_bound <= kCancellationTolerance))
            throw PrecisionError("CCDF lost precision in binomial cancellation", result.error_bound);
        return result.value;
    }

    void grow(int k)
    {
        while (static_cast<int>(exponents_.size()) < k) {
            const int j = static_cast<int>(exponents_.size()) + 1;
            double e = j * noise_slope_;
            if (coeff_ != 0.0)
                e += coeff_ * interference_exponent(j * theta_, alpha_);
            exponents_.push_back(e);
        }
    }

    double theta_;
    double alpha_;
    double noise_slope_;
    double coeff_;
    std::vector<double> exponents_;
};

std::vector<double> support_table(const UserCountModel& model, const AnalyticOptions& opts)
{
    return model.table(model.truncation_support(opts.tail_mass));
}

double marginal_from_table(double theta, const UserCountModel& model, const std::vector<double>& f,
                           const AnalyticOptions& opts)
{
    TermTable table(theta, model.params(), f[0], opts.interference_limited);
    return std::clamp(table.marginal(f), 0.0, 1.0 - f[0]);
}

} // namespace

double interferer_coefficient(const NetworkParams& p, double fN0)
{
    validated_f0(fN0);
    if (p.lambda_bs() == 0.0 || fN0 == 1.0)
        return 0.0;
    return 2.0 * (1.0 - fN0) * truncation_ratio(p.bs_in_range());
}

double transmit_power_moment(const NetworkParams& p)
{
    const double x = p.bs_in_range();
    if (x == 0.0)
        return 0.0;
    return std::pow(p.rho_target(), 2.0 / p.alpha()) * truncation_ratio(x) / (std::numbers::pi * p.lambda_bs());
}

double laplace_interference(double s, const NetworkParams& p, double fN0)
{
    if (!(s >= 0.0) || !std::isfinite(s))
        throw DomainError("Laplace argument must be finite and non-negative");
    const double coeff = interferer_coefficient(p, fN0);
    if (s == 0.0 || coeff == 0.0)
        return 1.0;
    return std::exp(-coeff * interference_exponent(s * p.rho_target(), p.alpha()));
}

double conditional_ccdf(SinrThreshold theta, int n, const NetworkParams& p, double fN0, const AnalyticOptions& opts)
{
    if (n < 1)
        throw DomainError("conditional CCDF needs at least one involved user");
    TermTable table(theta.linear(), p, validated_f0(fN0), opts.interference_limited);
    return table.conditional(n);
}

double conditional_ccdf_closed_form(SinrThreshold theta, int n, double fN0)
{
    if (n < 1)
        throw DomainError("conditional CCDF needs at least one involved user");
    const double active = 1.0 - validated_f0(fN0);
    const double t = theta.linear();
    auto term = [&](int k) {
        const double r = std::sqrt(k * t);
        return std::exp(-active * r * std::atan(r));
    };
    auto exact = [&](int k) {
        const Extended r = sqrt(Extended(k) * Extended(t));
        return Extended(exp(-Extended(active) * r * atan(r)));
    };
    return alternating_binomial_sum(n, term, exact, 8.0 * kEps);
}

double marginal_ccdf(SinrThreshold theta, const UserCountModel& model, const AnalyticOptions& opts)
{
    return marginal_from_table(theta.linear(), model, support_table(model, opts), opts);
}

CcdfCurve analytic_ccdf(std::span<const double> thetas, const UserCountModel& model, const AnalyticOptions& opts)
{
    CcdfCurve curve{{}, analytic_provenance(model.kind()), model.params()};
    curve.points.resize(thetas.size());
    const std::vector<double> f = support_table(model, opts);
    parallel_for(thetas.size(), opts.threads, [&](std::size_t i) {
        const double theta = SinrThreshold(thetas[i]).linear();
        curve.points[i] = {theta, marginal_from_table(theta, model, f, opts), 0.0};
    });
    return curve;
}

namespace {

QuadratureSpec tightened(const QuadratureSpec& spec)
{
    QuadratureSpec out = spec;
    out.rel_tol = std::min(spec.rel_tol, 1e-12);
    out.abs_tol = std::min(spec.abs_tol, 1e-15);
    out.max_subdivisions = std::max(spec.max_subdivisions, 400);
    return out;
}

// int_0^inf exp(-k x sigma^2/rho) L_I(k x / rho) / (1 + x) dx
QuadratureResult rate_integral(int k, const NetworkParams& p, double fN0, const QuadratureSpec& spec,
                               bool interference_limited)
{
    const double noise_slope = interference_limited ? 0.0 : p.noise_power() / p.rho_target();
    const double coeff = interferer_coefficient(p, fN0);
    const double alpha = p.alpha();
    const Integrand f = [=](double x) {
        double e = k * x * noise_slope;
        if (coeff != 0.0)
            e += coeff * interference_exponent(k * x, alpha);
        return std::exp(-e) / (1.0 + x);
    };
    return integrate_semiinfinite(f, spec);
}

} // namespace

double rate_round_robin(const UserCountModel& model, const AnalyticOptions& opts)
{
    const double f0 = model.f0();
    if (f0 >= 1.0)
        return 0.0;
    return (1.0 - f0) * rate_integral(1, model.params(), f0, opts.quadrature, opts.interference_limited).value;
}

RateEvaluation rate_scheduled_detail(const UserCountModel& model, const AnalyticOptions& opts)
{
    const std::vector<double> f = support_table(model, opts);
    const int n_max = static_cast<int>(f.size()) - 1;
    const double f0 = f[0];
    if (n_max < 1 || f0 >= 1.0)
        return {0.0, 0.0, RateMethod::BinomialIntegrals};

    const QuadratureSpec spec = tightened(opts.quadrature);
    const QuadratureResult first = rate_integral(1, model.params(), f0, spec, opts.interference_limited);
    double sum = 0.0;
    double comp = 0.0;
    double bound = 0.0;
    double magnitude = 0.0;
    bool certified = true;
    for (int k = 1; k <= n_max; ++k) {
        double weight = 0.0;
        for (int n = k; n <= n_max; ++n)
            if (f[n] > 0.0)
                weight += std::exp(std::log(f[n]) + std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
        if (weight * first.value < 1e-16)
            continue;
        const QuadratureResult ik = k == 1 ? first : rate_integral(k, model.params(), f0, spec, opts.interference_limited);
        const double x = (k % 2 == 1 ? 1.0 : -1.0) * weight * ik.value;
        const double s = sum + x;
        comp += std::abs(sum) >= std::abs(x) ? (sum - s) + x : (x - s) + sum;
        sum = s;
        magnitude += weight * std::abs(ik.value);
        bound += weight * (ik.error + 64.0 * kEps * std::abs(ik.value));
        // |value| <= magnitude, so past this point the final check cannot pass.
        if (bound > kCancellationTolerance * std::max(1.0, magnitude)) {
            certified = false;
            break;
        }
    }
    const double value = sum + comp;
    if (certified && bound <= kCancellationTolerance * std::max(1.0, std::abs(value)))
        return {std::max(0.0, value), bound, RateMethod::BinomialIntegrals};

    const Integrand integrand = [&](double x) {
        return marginal_from_table(x, model, f, opts) / (1.0 + x);
    };
    const QuadratureResult r = integrate_semiinfinite(integrand, opts.quadrature);
    return {std::max(0.0, r.value), r.error, RateMethod::CcdfIntegral};
}

double rate_scheduled(const UserCountModel& model, const AnalyticOptions& opts)
{
    return rate_scheduled_detail(model, opts).value;
}

double rate_by_layer_cake(const UserCountModel& model, const AnalyticOptions& opts)
{
    const std::vector<double> f = support_table(model, opts);
    if (f.size() < 2 || f[0] >= 1.0)
        return 0.0;
    const Integrand integrand = [&](double t) {
        if (t > 700.0)
            return 0.0;
        const double x = std::expm1(t);
        if (x <= 0.0)
            return 1.0 - f[0];
        return marginal_from_table(x, model, f, opts);
    };
    return integrate_semiinfinite(integrand, opts.quadrature).value;
}

RateReport scheduling_gain(const UserCountModel& model, const AnalyticOptions& opts)
{
    RateReport report;
    report.provenance = analytic_provenance(model.kind());
    report.rate_scheduled = rate_scheduled(model, opts);
    report.rate_round_robin = rate_round_robin(model, opts);
    if (report.rate_round_robin > 0.0)
        report.gain = report.rate_scheduled / report.rate_round_robin;
    return report;
}

} // namespace uplink
