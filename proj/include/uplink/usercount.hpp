#pragma once

#include "uplink/params.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace uplink {

/// Shape constant of the gamma approximation to the typical Voronoi cell area.
inline constexpr double kVoronoiShape = 3.5;

enum class UserCountKind { VoronoiCell, AchievableRange, Empirical };

std::string to_string(UserCountKind kind);

/// Users per typical Voronoi cell: Poisson counts mixed over a gamma cell area,
/// f(n) = Gamma(n+c) / (n! Gamma(c)) * x^n / (1+x)^(n+c), x = lambda_ue / (c lambda_bs).
double pmf_voronoi(int n, const NetworkParams& p);

/// Users inside the achievable disc: Poisson with mean lambda_ue * pi * R^2.
double pmf_range(int n, const NetworkParams& p);

/// Probability that the achievable disc covers the typical Voronoi cell.
double validity_g1(const NetworkParams& p);

/// Probability that the typical Voronoi cell covers the achievable disc.
double validity_g2(const NetworkParams& p);

/// Which user-count PMF the density regime supports; nullopt means neither.
std::optional<UserCountKind> recommend_model(const NetworkParams& p, double threshold = 0.9);

/// PMF of the number of involved users in a typical cell.
class UserCountModel {
public:
    static UserCountModel voronoi(const NetworkParams& p);
    static UserCountModel range(const NetworkParams& p);
    /// Arbitrary non-negative weights on n = 0, 1, ...; normalized here.
    static UserCountModel empirical(std::span<const double> weights, const NetworkParams& p);

    UserCountKind kind() const { return kind_; }
    const NetworkParams& params() const { return params_; }

    double pmf(int n) const;
    double f0() const { return pmf(0); }
    double mean() const;

    /// Smallest n_max with sum_{n > n_max} f(n) < tail_mass.
    int truncation_support(double tail_mass = 1e-9) const;

    /// f(0..n_max) as a vector.
    std::vector<double> table(int n_max) const;

private:
    UserCountModel(UserCountKind kind, NetworkParams p, std::vector<double> weights);

    std::vector<double> tail_table() const;

    UserCountKind kind_;
    NetworkParams params_;
    std::vector<double> weights_; // empirical only
};

/// Total-variation distance between two models over the union of their supports.
double total_variation(const UserCountModel& a, const UserCountModel& b, double tail_mass = 1e-12);

} // namespace uplink
