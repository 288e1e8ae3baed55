#include "uplink/usercount.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace uplink {

std::string to_string(UserCountKind kind)
{
    switch (kind) {
    case UserCountKind::VoronoiCell: return "voronoi-cell";
    case UserCountKind::AchievableRange: return "achievable-range";
    case UserCountKind::Empirical: return "empirical";
    }
    return "unknown";
}

double pmf_voronoi(int n, const NetworkParams& p)
{
    if (!(p.lambda_bs() > 0.0))
        throw ParameterError("Voronoi user-count PMF needs a positive BS density");
    if (n < 0)
        return 0.0;
    if (p.lambda_ue() == 0.0)
        return n == 0 ? 1.0 : 0.0;
    constexpr double c = kVoronoiShape;
    const double x = p.lambda_ue() / (c * p.lambda_bs());
    const double log_f = std::lgamma(n + c) - std::lgamma(n + 1.0) - std::lgamma(c)
                         + n * std::log(x) - (n + c) * std::log1p(x);
    return std::exp(log_f);
}

double pmf_range(int n, const NetworkParams& p)
{
    if (n < 0)
        return 0.0;
    const double mu = p.ue_in_range();
    if (mu == 0.0)
        return n == 0 ? 1.0 : 0.0;
    return std::exp(n * std::log(mu) - mu - std::lgamma(n + 1.0));
}

double validity_g1(const NetworkParams& p)
{
    return -std::expm1(-p.bs_in_range());
}

double validity_g2(const NetworkParams& p)
{
    return std::exp(-4.0 * p.bs_in_range());
}

std::optional<UserCountKind> recommend_model(const NetworkParams& p, double threshold)
{
    if (validity_g1(p) >= threshold)
        return UserCountKind::VoronoiCell;
    if (validity_g2(p) >= threshold)
        return UserCountKind::AchievableRange;
    return std::nullopt;
}

UserCountModel::UserCountModel(UserCountKind kind, NetworkParams p, std::vector<double> weights)
    : kind_(kind), params_(p), weights_(std::move(weights))
{
}

UserCountModel UserCountModel::voronoi(const NetworkParams& p)
{
    if (!(p.lambda_bs() > 0.0))
        throw ParameterError("Voronoi user-count PMF needs a positive BS density");
    return {UserCountKind::VoronoiCell, p, {}};
}

UserCountModel UserCountModel::range(const NetworkParams& p)
{
    return {UserCountKind::AchievableRange, p, {}};
}

UserCountModel UserCountModel::empirical(std::span<const double> weights, const NetworkParams& p)
{
    if (weights.empty())
        throw ParameterError("empirical user-count histogram is empty");
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w))
            throw ParameterError("empirical user-count weights must be non-negative");
        total += w;
    }
    if (!(total > 0.0))
        throw ParameterError("empirical user-count histogram has no mass");
    std::vector<double> normalized(weights.begin(), weights.end());
    for (double& w : normalized)
        w /= total;
    while (normalized.size() > 1 && normalized.back() == 0.0)
        normalized.pop_back();
    return {UserCountKind::Empirical, p, std::move(normalized)};
}

double UserCountModel::pmf(int n) const
{
    switch (kind_) {
    case UserCountKind::VoronoiCell: return pmf_voronoi(n, params_);
    case UserCountKind::AchievableRange: return pmf_range(n, params_);
    case UserCountKind::Empirical:
        return (n >= 0 && n < static_cast<int>(weights_.size())) ? weights_[n] : 0.0;
    }
    return 0.0;
}

double UserCountModel::mean() const
{
    switch (kind_) {
    case UserCountKind::VoronoiCell: return params_.lambda_ue() / params_.lambda_bs();
    case UserCountKind::AchievableRange: return params_.ue_in_range();
    case UserCountKind::Empirical: {
        double m = 0.0;
        for (std::size_t n = 0; n < weights_.size(); ++n)
            m += n * weights_[n];
        return m;
    }
    }
    return 0.0;
}

// PMF values out to where they are negligible; tail_table()[n] = sum_{m >= n} f(m).
std::vector<double> UserCountModel::tail_table() const
{
    std::vector<double> f;
    if (kind_ == UserCountKind::Empirical) {
        f = weights_;
    } else {
        const double m = mean();
        for (int n = 0;; ++n) {
            const double v = pmf(n);
            f.push_back(v);
            if ((n > m && v < 1e-30) || n > 1'000'000)
                break;
        }
    }
    std::vector<double> tail(f.size() + 1, 0.0);
    for (std::size_t i = f.size(); i-- > 0;)
        tail[i] = tail[i + 1] + f[i];
    return tail;
}

int UserCountModel::truncation_support(double tail_mass) const
{
    const std::vector<double> tail = tail_table();
    for (std::size_t n = 0; n + 1 < tail.size(); ++n)
        if (tail[n + 1] < tail_mass)
            return static_cast<int>(n);
    return static_cast<int>(tail.size()) - 2;
}

std::vector<double> UserCountModel::table(int n_max) const
{
    std::vector<double> out(n_max + 1);
    for (int n = 0; n <= n_max; ++n)
        out[n] = pmf(n);
    return out;
}

double total_variation(const UserCountModel& a, const UserCountModel& b, double tail_mass)
{
    const int n_max = std::max(a.truncation_support(tail_mass), b.truncation_support(tail_mass));
    double tv = 0.0;
    for (int n = 0; n <= n_max; ++n)
        tv += std::abs(a.pmf(n) - b.pmf(n));
    return 0.5 * tv;
}

} // namespace uplink
