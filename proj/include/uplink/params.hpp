#pragma once

#include <stdexcept>
#include <string>

namespace uplink {

/// Raised when a configuration value violates a model precondition.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Path-loss exponent at or below 2: the aggregate interference diverges.
class PathLossExponentError : public ParameterError {
public:
    explicit PathLossExponentError(double alpha);
};

// ---------- unit conversions ----------
double dbm_to_mw(double dbm);
double mw_to_dbm(double mw);
double db_to_linear(double db);
double linear_to_db(double linear);
double per_km2_to_per_m2(double density);
double per_m2_to_per_km2(double density);

/// Human-facing configuration, as accepted by the CLI.
struct RawConfig {
    double lambda_bs_per_km2 = 20.0;
    double lambda_ue_per_km2 = 8.0;
    double alpha = 4.0;
    double noise_dbm = -90.0;
    double pu_dbm = 23.0;
    double rho_dbm = -70.0;
};

/// Radio and geometry parameters in SI-linear units (m, mW).
/// Immutable once constructed; the achievable radius is computed here once.
class NetworkParams {
public:
    NetworkParams(double lambda_bs, double lambda_ue, double alpha,
                  double noise_power, double p_max, double rho_target);

    double lambda_bs() const { return lambda_bs_; }     // BSs per m^2
    double lambda_ue() const { return lambda_ue_; }     // users per m^2
    double alpha() const { return alpha_; }
    double noise_power() const { return noise_power_; } // mW
    double p_max() const { return p_max_; }             // mW
    double rho_target() const { return rho_target_; }   // mW
    double achievable_radius() const { return radius_; } // m

    /// pi * lambda_bs * R^2, the mean number of BSs inside the achievable disc.
    double bs_in_range() const;
    /// pi * lambda_ue * R^2, the mean number of users inside the achievable disc.
    double ue_in_range() const;

    NetworkParams with_lambda_bs(double lambda_bs) const;
    NetworkParams with_lambda_ue(double lambda_ue) const;
    NetworkParams with_noise_power(double noise_power) const;

    std::string describe() const;

private:
    double lambda_bs_;
    double lambda_ue_;
    double alpha_;
    double noise_power_;
    double p_max_;
    double rho_target_;
    double radius_;
};

NetworkParams make_params(const RawConfig& raw);

/// Probability that no BS lies within the achievable radius of a typical user.
double outage_probability(const NetworkParams& p);

/// Linear SINR threshold.
class SinrThreshold {
public:
    explicit SinrThreshold(double linear);
    static SinrThreshold from_db(double db);

    double linear() const { return theta_; }
    double db() const { return linear_to_db(theta_); }
    /// k * theta, the scaled threshold seen by the k-th binomial term.
    double scaled(int k) const { return k * theta_; }

private:
    double theta_;
};

} // namespace uplink
