#pragma once

#include "uplink/analytic.hpp"
#include "uplink/params.hpp"
#include "uplink/usercount.hpp"

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace uplink {

enum class Scheduler { NormalizedSnr, RoundRobin };

struct Point {
    double x = 0.0;
    double y = 0.0;
};

struct SimulationConfig {
    std::size_t trials = 10000;
    /// Disc radius of the simulation window; default max(10/sqrt(lambda_bs), 4R).
    std::optional<double> window_radius;
    /// The measurement BS is drawn uniformly among BSs within this radius of the
    /// centre; default half the window radius.
    std::optional<double> measurement_radius;
    std::uint64_t seed = 1;
    /// Worker threads; 0 picks the hardware concurrency. Results do not depend on it.
    unsigned threads = 0;
    /// Resolve the nearest BS of users beyond the achievable radius as well. Involved
    /// users are always associated exactly.
    bool exact_association = false;

    double resolved_window(const NetworkParams& p) const;
    double resolved_measurement_radius(const NetworkParams& p) const;
    void validate(const NetworkParams& p) const;
};

/// Points and marks of one trial before association and scheduling.
struct Population {
    std::vector<Point> bs_points;
    std::vector<Point> user_points;
    std::vector<double> fading;       // h, user -> serving BS
    std::vector<double> cross_fading; // g, user -> measurement BS
    std::vector<double> rr_keys;      // uniform keys; max key is the round-robin pick
    double measurement_pick = 0.0;    // uniform in [0, 1)
};

struct NetworkRealization {
    std::vector<Point> bs_points;
    std::vector<Point> user_points;
    std::vector<double> fading;
    std::vector<double> cross_fading;
    std::vector<double> rr_keys;
    std::vector<int> association;         // nearest BS; -1 when unresolved (no BS within R)
    std::vector<double> serving_distance; // m; infinity when unresolved
    std::vector<std::uint8_t> involved;   // serving distance <= R
    std::vector<double> tx_power;         // rho_o d^alpha for involved users, else 0
    std::vector<int> scheduled;           // per BS: user index under normalized-SNR, or -1
    std::vector<int> scheduled_round_robin;
    std::vector<int> involved_per_bs;
    int measurement_bs = -1;

    bool empty() const { return measurement_bs < 0; }
    int involved_count(int bs) const;
};

/// Index of the largest value; lowest index wins ties. Requires a non-empty span.
std::size_t select_scheduled(std::span<const double> fades);

/// 64-bit seed for one trial's random stream, from (seed, trial_index) only.
std::uint64_t trial_stream_seed(std::uint64_t seed, std::uint64_t trial_index);

Population sample_population(const NetworkParams& p, const SimulationConfig& cfg, std::uint64_t trial_index);

/// Keeps only points within `radius` of the centre, preserving order and marks.
Population restrict_population(const Population& pop, double radius);

NetworkRealization build_realization(const Population& pop, const NetworkParams& p, const SimulationConfig& cfg);

NetworkRealization sample_realization(const NetworkParams& p, const SimulationConfig& cfg, std::uint64_t trial_index);

/// Aggregate interference at the measurement BS from other cells' scheduled users.
double measure_interference(const NetworkRealization& r, const NetworkParams& p,
                            Scheduler scheduler = Scheduler::NormalizedSnr);

/// SINR of the measurement cell's scheduled user; nullopt if the cell has no involved user.
std::optional<double> measure_sinr(const NetworkRealization& r, const NetworkParams& p,
                                   Scheduler scheduler = Scheduler::NormalizedSnr);

struct TrialOutcome {
    std::optional<double> sinr_scheduled;
    std::optional<double> sinr_round_robin;
    int involved_count = -1; // at the measurement BS; -1 for an empty realization
    double interference = 0.0; // normalized-SNR interferers, at the measurement BS
    std::size_t users = 0;          // users within the interior radius
    std::size_t users_involved = 0; // of those, users with a BS within R
};

/// Measures one realization. User counts cover only users within `interior_radius` of
/// the centre; run_simulation uses the window radius minus R, so every counted user's
/// achievable disc lies inside the window.
TrialOutcome run_trial(const NetworkRealization& r, const NetworkParams& p,
                       double interior_radius = std::numeric_limits<double>::infinity());

struct SimulationSummary {
    NetworkParams params;
    SimulationConfig config;
    std::vector<TrialOutcome> trials;
};

SimulationSummary run_simulation(const NetworkParams& p, const SimulationConfig& cfg);

CcdfCurve empirical_ccdf(const SimulationSummary& sim, std::span<const double> thetas,
                         Scheduler scheduler = Scheduler::NormalizedSnr);
CcdfCurve empirical_ccdf(const NetworkParams& p, const SimulationConfig& cfg, std::span<const double> thetas);

UserCountModel empirical_user_count(const SimulationSummary& sim);
UserCountModel empirical_user_count(const NetworkParams& p, const SimulationConfig& cfg);

RateReport empirical_rates(const SimulationSummary& sim);
RateReport empirical_rates(const NetworkParams& p, const SimulationConfig& cfg);

struct Estimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t samples = 0;
};

/// E[exp(-s I)] over trials whose measurement cell has a scheduled user.
Estimate empirical_laplace(const SimulationSummary& sim, double s);

/// Fraction of counted users that are not involved (no BS within R).
Estimate non_involved_fraction(const SimulationSummary& sim);

/// Plain-text table of one realization: type, x, y, serving BS, involved, scheduled, power.
void write_realization(std::ostream& os, const NetworkRealization& r);

} // namespace uplink
