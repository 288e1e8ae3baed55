#include "uplink/params.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace uplink {

namespace {

void require_finite(double x, const char* what)
{
    if (!std::isfinite(x))
        throw ParameterError(std::string(what) + " must be finite");
}

} // namespace

PathLossExponentError::PathLossExponentError(double alpha)
    : ParameterError("path-loss exponent must exceed 2 (got " + std::to_string(alpha) + ")")
{
}

double dbm_to_mw(double dbm)
{
    require_finite(dbm, "power in dBm");
    return std::pow(10.0, dbm / 10.0);
}

double mw_to_dbm(double mw)
{
    if (!(mw > 0.0) || !std::isfinite(mw))
        throw ParameterError("power in mW must be positive and finite");
    return 10.0 * std::log10(mw);
}

double db_to_linear(double db)
{
    require_finite(db, "value in dB");
    return std::pow(10.0, db / 10.0);
}

double linear_to_db(double linear)
{
    if (!(linear > 0.0) || !std::isfinite(linear))
        throw ParameterError("linear value must be positive and finite");
    return 10.0 * std::log10(linear);
}

double per_km2_to_per_m2(double density) { return density * 1e-6; }
double per_m2_to_per_km2(double density) { return density * 1e6; }

NetworkParams::NetworkParams(double lambda_bs, double lambda_ue, double alpha,
                             double noise_power, double p_max, double rho_target)
    : lambda_bs_(lambda_bs), lambda_ue_(lambda_ue), alpha_(alpha),
      noise_power_(noise_power), p_max_(p_max), rho_target_(rho_target)
{
    require_finite(lambda_bs, "BS density");
    require_finite(lambda_ue, "user density");
    require_finite(alpha, "path-loss exponent");
    require_finite(noise_power, "noise power");
    require_finite(p_max, "maximum transmit power");
    require_finite(rho_target, "power-control target");
    if (!(alpha > 2.0))
        throw PathLossExponentError(alpha);
    if (lambda_bs < 0.0)
        throw ParameterError("BS density must be non-negative");
    if (lambda_ue < 0.0)
        throw ParameterError("user density must be non-negative");
    if (!(p_max > 0.0))
        throw ParameterError("maximum transmit power must be positive");
    if (!(rho_target > 0.0))
        throw ParameterError("power-control target must be positive");
    if (noise_power < 0.0)
        throw ParameterError("noise power must be non-negative");
    radius_ = std::pow(p_max_ / rho_target_, 1.0 / alpha_);
}

double NetworkParams::bs_in_range() const
{
    return std::numbers::pi * lambda_bs_ * radius_ * radius_;
}

double NetworkParams::ue_in_range() const
{
    return std::numbers::pi * lambda_ue_ * radius_ * radius_;
}

NetworkParams NetworkParams::with_lambda_bs(double lambda_bs) const
{
    return {lambda_bs, lambda_ue_, alpha_, noise_power_, p_max_, rho_target_};
}

NetworkParams NetworkParams::with_lambda_ue(double lambda_ue) const
{
    return {lambda_bs_, lambda_ue, alpha_, noise_power_, p_max_, rho_target_};
}

NetworkParams NetworkParams::with_noise_power(double noise_power) const
{
    return {lambda_bs_, lambda_ue_, alpha_, noise_power, p_max_, rho_target_};
}

std::string NetworkParams::describe() const
{
    std::ostringstream os;
    os.precision(17);
    os << "lambda_bs_per_m2=" << lambda_bs_ << " lambda_ue_per_m2=" << lambda_ue_
       << " alpha=" << alpha_ << " noise_mw=" << noise_power_ << " p_max_mw=" << p_max_
       << " rho_target_mw=" << rho_target_ << " achievable_radius_m=" << radius_;
    return os.str();
}

NetworkParams make_params(const RawConfig& raw)
{
    if (raw.lambda_bs_per_km2 < 0.0)
        throw ParameterError("BS density must be non-negative");
    if (raw.lambda_ue_per_km2 < 0.0)
        throw ParameterError("user density must be non-negative");
    return {per_km2_to_per_m2(raw.lambda_bs_per_km2), per_km2_to_per_m2(raw.lambda_ue_per_km2),
            raw.alpha, dbm_to_mw(raw.noise_dbm), dbm_to_mw(raw.pu_dbm), dbm_to_mw(raw.rho_dbm)};
}

double outage_probability(const NetworkParams& p)
{
    return std::exp(-p.bs_in_range());
}

SinrThreshold::SinrThreshold(double linear) : theta_(linear)
{
    if (!(linear > 0.0) || !std::isfinite(linear))
        throw ParameterError("SINR threshold must be positive and finite");
}

SinrThreshold SinrThreshold::from_db(double db)
{
    return SinrThreshold(db_to_linear(db));
}

} // namespace uplink
