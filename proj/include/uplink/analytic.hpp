#pragma once

#include "uplink/params.hpp"
#include "uplink/specfun.hpp"
#include "uplink/usercount.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace uplink {

enum class Provenance { AnalyticVoronoi, AnalyticRange, AnalyticEmpirical, Simulated };

std::string to_string(Provenance p);
Provenance analytic_provenance(UserCountKind kind);

struct CcdfPoint {
    double theta = 0.0;  // linear
    double prob = 0.0;
    double std_error = 0.0; // Monte Carlo standard error; 0 for analytic curves
};

struct CcdfCurve {
    std::vector<CcdfPoint> points;
    Provenance provenance = Provenance::Simulated;
    NetworkParams params;

    bool non_increasing() const;
};

struct AnalyticOptions {
    /// Drop the noise term (sigma^2 treated as 0) regardless of the parameter set.
    bool interference_limited = false;
    QuadratureSpec quadrature{};
    /// Mass of the user-count PMF allowed beyond the summation cut-off.
    double tail_mass = 1e-12;
    /// Worker threads for curve evaluation; 0 picks the hardware concurrency.
    unsigned threads = 0;
};

/// 2 (1 - f0) gamma(2, pi lambda R^2) / (1 - exp(-pi lambda R^2)): the factor that turns
/// theta^(2/alpha) J(theta) into the Laplace exponent.
double interferer_coefficient(const NetworkParams& p, double fN0);

/// E[p^(2/alpha)] for the truncated channel-inversion transmit power.
double transmit_power_moment(const NetworkParams& p);

/// Laplace transform of the aggregate interference at the typical BS, with scheduled
/// interferers thinned to density (1 - fN0) lambda_bs.
double laplace_interference(double s, const NetworkParams& p, double fN0);

/// P(SINR > theta | n involved users).
double conditional_ccdf(SinrThreshold theta, int n, const NetworkParams& p, double fN0,
                        const AnalyticOptions& opts = {});

/// Same quantity for alpha = 4, no noise, unbounded transmit power.
double conditional_ccdf_closed_form(SinrThreshold theta, int n, double fN0);

/// P(SINR > theta) marginalized over the user-count model, whose f(0) also thins the
/// interferers.
double marginal_ccdf(SinrThreshold theta, const UserCountModel& model, const AnalyticOptions& opts = {});

CcdfCurve analytic_ccdf(std::span<const double> thetas, const UserCountModel& model,
                        const AnalyticOptions& opts = {});

enum class RateMethod {
    /// Per-k integrals combined with binomial weights E[C(N, k)].
    BinomialIntegrals,
    /// Integral of the marginal CCDF against dx / (1 + x); taken when the binomial
    /// weights cannot certify the cancellation.
    CcdfIntegral,
};

struct RateEvaluation {
    double value = 0.0;
    double error_bound = 0.0;
    RateMethod method = RateMethod::BinomialIntegrals;
};

struct RateReport {
    double rate_scheduled = 0.0;   // nats per channel use
    double rate_round_robin = 0.0; // nats per channel use
    std::optional<double> gain;    // empty when the round-robin rate is zero
    std::optional<double> rate_scheduled_stderr;
    std::optional<double> rate_round_robin_stderr;
    Provenance provenance = Provenance::Simulated;
};

/// E[ln(1 + SINR)] under normalized-SNR scheduling.
RateEvaluation rate_scheduled_detail(const UserCountModel& model, const AnalyticOptions& opts = {});
double rate_scheduled(const UserCountModel& model, const AnalyticOptions& opts = {});

/// Average rate with a uniformly chosen involved user; zero in cells without one.
double rate_round_robin(const UserCountModel& model, const AnalyticOptions& opts = {});

/// int_0^inf P(SINR > e^t - 1) dt; the layer-cake evaluation of the scheduled rate.
double rate_by_layer_cake(const UserCountModel& model, const AnalyticOptions& opts = {});

RateReport scheduling_gain(const UserCountModel& model, const AnalyticOptions& opts = {});

} // namespace uplink
