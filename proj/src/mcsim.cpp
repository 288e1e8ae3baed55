#include "uplink/mcsim.hpp"

#include "uplink/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>

namespace uplink {

double SimulationConfig::resolved_window(const NetworkParams& p) const
{
    if (window_radius)
        return *window_radius;
    const double floor_radius = 4.0 * p.achievable_radius();
    if (p.lambda_bs() == 0.0)
        return floor_radius;
    return std::max(10.0 / std::sqrt(p.lambda_bs()), floor_radius);
}

double SimulationConfig::resolved_measurement_radius(const NetworkParams& p) const
{
    return measurement_radius ? *measurement_radius : 0.5 * resolved_window(p);
}

void SimulationConfig::validate(const NetworkParams& p) const
{
    if (trials < 1)
        throw ParameterError("simulation needs at least one trial");
    const double w = resolved_window(p);
    if (!(w >= 2.0 * p.achievable_radius()) || !std::isfinite(w))
        throw ParameterError("simulation window radius must be at least twice the achievable radius");
    const double m = resolved_measurement_radius(p);
    if (!(m > 0.0) || m > w)
        throw ParameterError("measurement radius must lie in (0, window radius]");
}

int NetworkRealization::involved_count(int bs) const
{
    if (bs < 0 || bs >= static_cast<int>(involved_per_bs.size()))
        return 0;
    return involved_per_bs[bs];
}

std::size_t select_scheduled(std::span<const double> fades)
{
    std::size_t best = 0;
    for (std::size_t i = 1; i < fades.size(); ++i)
        if (fades[i] > fades[best])
            best = i;
    return best;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

class Stream {
public:
    explicit Stream(std::uint64_t seed) : engine_(seed) {}

    // 53-bit uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double exponential() { return -std::log1p(-uniform()); }

    std::int64_t poisson(double mean)
    {
        if (!(mean > 0.0))
            return 0;
        return std::poisson_distribution<std::int64_t>(mean)(engine_);
    }

    Point in_disc(double radius)
    {
        const double r = radius * std::sqrt(uniform());
        const double phi = 2.0 * std::numbers::pi * uniform();
        return {r * std::cos(phi), r * std::sin(phi)};
    }

private:
    std::mt19937_64 engine_;
};

double dist2(const Point& a, const Point& b)
{
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy;
}

// Uniform bucket grid over BS positions, square [-extent, extent]^2.
class BsGrid {
public:
    BsGrid(std::span<const Point> bs, double extent, double cell)
        : bs_(bs), extent_(extent)
    {
        constexpr double kMaxCellsPerSide = 2048.0;
        cell_ = std::max(cell, 2.0 * extent / kMaxCellsPerSide);
        side_ = std::max(1, static_cast<int>(std::ceil(2.0 * extent / cell_)));
        start_.assign(static_cast<std::size_t>(side_) * side_ + 1, 0);
        std::vector<int> cell_of(bs.size());
        for (std::size_t i = 0; i < bs.size(); ++i) {
            cell_of[i] = index(ix(bs[i].x), ix(bs[i].y));
            ++start_[cell_of[i] + 1];
        }
        for (std::size_t c = 1; c < start_.size(); ++c)
            start_[c] += start_[c - 1];
        items_.resize(bs.size());
        std::vector<int> fill(start_.begin(), start_.end() - 1);
        for (std::size_t i = 0; i < bs.size(); ++i)
            items_[fill[cell_of[i]]++] = static_cast<int>(i);
    }

    // Nearest BS among those within `radius`; (-1, inf) if none.
    std::pair<int, double> nearest_within(const Point& p, double radius) const
    {
        const int rings = static_cast<int>(std::ceil(radius / cell_));
        int best = -1;
        double best_d2 = radius * radius;
        const int cx = ix(p.x);
        const int cy = ix(p.y);
        for (int gy = std::max(0, cy - rings); gy <= std::min(side_ - 1, cy + rings); ++gy)
            for (int gx = std::max(0, cx - rings); gx <= std::min(side_ - 1, cx + rings); ++gx)
                scan(index(gx, gy), p, best, best_d2);
        if (best < 0)
            return {-1, std::numeric_limits<double>::infinity()};
        return {best, std::sqrt(best_d2)};
    }

    // Exact nearest BS by expanding rings of cells.
    std::pair<int, double> nearest(const Point& p) const
    {
        int best = -1;
        double best_d2 = std::numeric_limits<double>::infinity();
        const int cx = ix(p.x);
        const int cy = ix(p.y);
        for (int r = 0; r <= side_; ++r) {
            for (int gy = cy - r; gy <= cy + r; ++gy) {
                if (gy < 0 || gy >= side_)
                    continue;
                const bool edge_row = (gy == cy - r || gy == cy + r);
                for (int gx = cx - r; gx <= cx + r; gx += (edge_row ? 1 : 2 * r)) {
                    if (gx >= 0 && gx < side_)
                        scan(index(gx, gy), p, best, best_d2);
                    if (r == 0)
                        break;
                }
            }
            const double reach = r * cell_;
            if (best >= 0 && best_d2 <= reach * reach)
                break;
        }
        if (best < 0)
            return {-1, std::numeric_limits<double>::infinity()};
        return {best, std::sqrt(best_d2)};
    }

private:
    int ix(double v) const
    {
        const int i = static_cast<int>(std::floor((v + extent_) / cell_));
        return std::clamp(i, 0, side_ - 1);
    }
    int index(int gx, int gy) const { return gy * side_ + gx; }

    void scan(int c, const Point& p, int& best, double& best_d2) const
    {
        for (int k = start_[c]; k < start_[c + 1]; ++k) {
            const int b = items_[k];
            const double d2 = dist2(p, bs_[b]);
            if (d2 < best_d2 || (d2 == best_d2 && best >= 0 && b < best) || (d2 <= best_d2 && best < 0)) {
                best = b;
                best_d2 = d2;
            }
        }
    }

    std::span<const Point> bs_;
    double extent_;
    double cell_ = 1.0;
    int side_ = 1;
    std::vector<int> start_;
    std::vector<int> items_;
};

double window_extent(const Population& pop)
{
    double r2 = 0.0;
    for (const Point& b : pop.bs_points)
        r2 = std::max(r2, b.x * b.x + b.y * b.y);
    for (const Point& u : pop.user_points)
        r2 = std::max(r2, u.x * u.x + u.y * u.y);
    return std::max(1.0, std::sqrt(r2));
}

} // namespace

std::uint64_t trial_stream_seed(std::uint64_t seed, std::uint64_t trial_index)
{
    return splitmix64(splitmix64(seed) ^ splitmix64(trial_index ^ 0xd1b54a32d192ed03ULL));
}

Population sample_population(const NetworkParams& p, const SimulationConfig& cfg, std::uint64_t trial_index)
{
    const double w = cfg.resolved_window(p);
    const double area = std::numbers::pi * w * w;
    Stream stream(trial_stream_seed(cfg.seed, trial_index));
    Population pop;
    const std::int64_t n_bs = stream.poisson(p.lambda_bs() * area);
    pop.bs_points.reserve(n_bs);
    for (std::int64_t i = 0; i < n_bs; ++i)
        pop.bs_points.push_back(stream.in_disc(w));
    const std::int64_t n_ue = stream.poisson(p.lambda_ue() * area);
    pop.user_points.reserve(n_ue);
    pop.fading.reserve(n_ue);
    pop.cross_fading.reserve(n_ue);
    pop.rr_keys.reserve(n_ue);
    for (std::int64_t i = 0; i < n_ue; ++i) {
        pop.user_points.push_back(stream.in_disc(w));
        pop.fading.push_back(stream.exponential());
        pop.cross_fading.push_back(stream.exponential());
        pop.rr_keys.push_back(stream.uniform());
    }
    pop.measurement_pick = stream.uniform();
    return pop;
}

Population restrict_population(const Population& pop, double radius)
{
    const double r2 = radius * radius;
    Population out;
    out.measurement_pick = pop.measurement_pick;
    for (const Point& b : pop.bs_points)
        if (b.x * b.x + b.y * b.y <= r2)
            out.bs_points.push_back(b);
    for (std::size_t i = 0; i < pop.user_points.size(); ++i) {
        const Point& u = pop.user_points[i];
        if (u.x * u.x + u.y * u.y <= r2) {
            out.user_points.push_back(u);
            out.fading.push_back(pop.fading[i]);
            out.cross_fading.push_back(pop.cross_fading[i]);
            out.rr_keys.push_back(pop.rr_keys[i]);
        }
    }
    return out;
}

NetworkRealization build_realization(const Population& pop, const NetworkParams& p, const SimulationConfig& cfg)
{
    NetworkRealization r;
    r.bs_points = pop.bs_points;
    r.user_points = pop.user_points;
    r.fading = pop.fading;
    r.cross_fading = pop.cross_fading;
    r.rr_keys = pop.rr_keys;
    const std::size_t n_bs = r.bs_points.size();
    const std::size_t n_ue = r.user_points.size();
    r.association.assign(n_ue, -1);
    r.serving_distance.assign(n_ue, std::numeric_limits<double>::infinity());
    r.involved.assign(n_ue, 0);
    r.tx_power.assign(n_ue, 0.0);
    r.scheduled.assign(n_bs, -1);
    r.scheduled_round_robin.assign(n_bs, -1);
    r.involved_per_bs.assign(n_bs, 0);
    if (n_bs == 0)
        return r;

    const double radius = p.achievable_radius();
    const BsGrid grid(r.bs_points, window_extent(pop), radius);
    for (std::size_t u = 0; u < n_ue; ++u) {
        auto [b, d] = grid.nearest_within(r.user_points[u], radius);
        if (b >= 0) {
            r.association[u] = b;
            r.serving_distance[u] = d;
            r.involved[u] = 1;
            r.tx_power[u] = p.rho_target() * std::pow(d, p.alpha());
            ++r.involved_per_bs[b];
            int& best = r.scheduled[b];
            if (best < 0 || r.fading[u] > r.fading[best])
                best = static_cast<int>(u);
            int& pick = r.scheduled_round_robin[b];
            if (pick < 0 || r.rr_keys[u] > r.rr_keys[pick])
                pick = static_cast<int>(u);
        } else if (cfg.exact_association) {
            auto [nb, nd] = grid.nearest(r.user_points[u]);
            r.association[u] = nb;
            r.serving_distance[u] = nd;
        }
    }

    const double m = cfg.resolved_measurement_radius(p);
    std::vector<int> candidates;
    for (std::size_t b = 0; b < n_bs; ++b)
        if (r.bs_points[b].x * r.bs_points[b].x + r.bs_points[b].y * r.bs_points[b].y <= m * m)
            candidates.push_back(static_cast<int>(b));
    if (!candidates.empty()) {
        const auto pick = std::min(candidates.size() - 1,
                                   static_cast<std::size_t>(pop.measurement_pick * candidates.size()));
        r.measurement_bs = candidates[pick];
    }
    return r;
}

NetworkRealization sample_realization(const NetworkParams& p, const SimulationConfig& cfg, std::uint64_t trial_index)
{
    return build_realization(sample_population(p, cfg, trial_index), p, cfg);
}

double measure_interference(const NetworkRealization& r, const NetworkParams& p, Scheduler scheduler)
{
    if (r.empty())
        return 0.0;
    const Point& target = r.bs_points[r.measurement_bs];
    const std::vector<int>& chosen = scheduler == Scheduler::NormalizedSnr ? r.scheduled : r.scheduled_round_robin;
    const double half_alpha = 0.5 * p.alpha();
    double total = 0.0;
    for (std::size_t b = 0; b < chosen.size(); ++b) {
        if (static_cast<int>(b) == r.measurement_bs || chosen[b] < 0)
            continue;
        const int u = chosen[b];
        total += r.cross_fading[u] * r.tx_power[u] / std::pow(dist2(r.user_points[u], target), half_alpha);
    }
    return total;
}

std::optional<double> measure_sinr(const NetworkRealization& r, const NetworkParams& p, Scheduler scheduler)
{
    if (r.empty())
        return std::nullopt;
    const int b0 = r.measurement_bs;
    const int u = scheduler == Scheduler::NormalizedSnr ? r.scheduled[b0] : r.scheduled_round_robin[b0];
    if (u < 0)
        return std::nullopt;
    // Channel inversion makes the mean received power exactly rho_o.
    const double signal = r.fading[u] * p.rho_target();
    return signal / (p.noise_power() + measure_interference(r, p, scheduler));
}

TrialOutcome run_trial(const NetworkRealization& r, const NetworkParams& p, double interior_radius)
{
    TrialOutcome out;
    const double r2 = interior_radius * interior_radius;
    for (std::size_t u = 0; u < r.user_points.size(); ++u) {
        const Point& pt = r.user_points[u];
        if (pt.x * pt.x + pt.y * pt.y > r2)
            continue;
        ++out.users;
        out.users_involved += r.involved[u];
    }
    if (r.empty())
        return out;
    out.involved_count = r.involved_count(r.measurement_bs);
    out.interference = measure_interference(r, p, Scheduler::NormalizedSnr);
    out.sinr_scheduled = measure_sinr(r, p, Scheduler::NormalizedSnr);
    out.sinr_round_robin = measure_sinr(r, p, Scheduler::RoundRobin);
    return out;
}

SimulationSummary run_simulation(const NetworkParams& p, const SimulationConfig& cfg)
{
    cfg.validate(p);
    SimulationSummary sim{p, cfg, std::vector<TrialOutcome>(cfg.trials)};
    const double interior = cfg.resolved_window(p) - p.achievable_radius();
    parallel_for(cfg.trials, cfg.threads, [&](std::size_t i) {
        sim.trials[i] = run_trial(sample_realization(p, cfg, i), p, interior);
    });
    return sim;
}

namespace {

// Neumaier-compensated running sum; fed in trial order so results are reproducible.
class CompensatedSum {
public:
    void add(double x)
    {
        const double t = sum_ + x;
        comp_ += std::abs(sum_) >= std::abs(x) ? (sum_ - t) + x : (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

Estimate mean_of(std::span<const double> xs)
{
    Estimate e;
    e.samples = xs.size();
    if (xs.empty())
        return e;
    CompensatedSum s;
    for (double x : xs)
        s.add(x);
    e.mean = s.value() / xs.size();
    if (xs.size() > 1) {
        CompensatedSum v;
        for (double x : xs)
            v.add((x - e.mean) * (x - e.mean));
        e.std_error = std::sqrt(v.value() / (xs.size() - 1) / xs.size());
    }
    return e;
}

} // namespace

CcdfCurve empirical_ccdf(const SimulationSummary& sim, std::span<const double> thetas, Scheduler scheduler)
{
    CcdfCurve curve{{}, Provenance::Simulated, sim.params};
    const double total = static_cast<double>(sim.trials.size());
    for (double theta : thetas) {
        std::size_t hits = 0;
        for (const TrialOutcome& t : sim.trials) {
            const auto& s = scheduler == Scheduler::NormalizedSnr ? t.sinr_scheduled : t.sinr_round_robin;
            if (s && *s > theta)
                ++hits;
        }
        const double prob = total > 0 ? hits / total : 0.0;
        const double se = total > 0 ? std::sqrt(prob * (1.0 - prob) / total) : 0.0;
        curve.points.push_back({theta, prob, se});
    }
    return curve;
}

CcdfCurve empirical_ccdf(const NetworkParams& p, const SimulationConfig& cfg, std::span<const double> thetas)
{
    return empirical_ccdf(run_simulation(p, cfg), thetas);
}

UserCountModel empirical_user_count(const SimulationSummary& sim)
{
    std::vector<double> histogram(1, 0.0);
    for (const TrialOutcome& t : sim.trials) {
        if (t.involved_count < 0)
            continue;
        if (t.involved_count >= static_cast<int>(histogram.size()))
            histogram.resize(t.involved_count + 1, 0.0);
        histogram[t.involved_count] += 1.0;
    }
    return UserCountModel::empirical(histogram, sim.params);
}

UserCountModel empirical_user_count(const NetworkParams& p, const SimulationConfig& cfg)
{
    return empirical_user_count(run_simulation(p, cfg));
}

RateReport empirical_rates(const SimulationSummary& sim)
{
    std::vector<double> scheduled;
    std::vector<double> round_robin;
    scheduled.reserve(sim.trials.size());
    round_robin.reserve(sim.trials.size());
    for (const TrialOutcome& t : sim.trials) {
        scheduled.push_back(t.sinr_scheduled ? std::log1p(*t.sinr_scheduled) : 0.0);
        round_robin.push_back(t.sinr_round_robin ? std::log1p(*t.sinr_round_robin) : 0.0);
    }
    const Estimate s = mean_of(scheduled);
    const Estimate r = mean_of(round_robin);
    RateReport report;
    report.provenance = Provenance::Simulated;
    report.rate_scheduled = s.mean;
    report.rate_round_robin = r.mean;
    report.rate_scheduled_stderr = s.std_error;
    report.rate_round_robin_stderr = r.std_error;
    if (r.mean > 0.0)
        report.gain = s.mean / r.mean;
    return report;
}

RateReport empirical_rates(const NetworkParams& p, const SimulationConfig& cfg)
{
    return empirical_rates(run_simulation(p, cfg));
}

Estimate empirical_laplace(const SimulationSummary& sim, double s)
{
    std::vector<double> samples;
    for (const TrialOutcome& t : sim.trials)
        if (t.involved_count > 0)
            samples.push_back(std::exp(-s * t.interference));
    return mean_of(samples);
}

Estimate non_involved_fraction(const SimulationSummary& sim)
{
    std::size_t users = 0;
    std::size_t involved = 0;
    for (const TrialOutcome& t : sim.trials) {
        users += t.users;
        involved += t.users_involved;
    }
    Estimate e;
    e.samples = users;
    if (users == 0)
        return e;
    e.mean = static_cast<double>(users - involved) / users;
    e.std_error = std::sqrt(e.mean * (1.0 - e.mean) / users);
    return e;
}

void write_realization(std::ostream& os, const NetworkRealization& r)
{
    os << "# type index x_m y_m serving_bs involved scheduled tx_power_mw\n";
    os << "# bs rows: serving_bs is -1, involved is the involved-user count, scheduled is the\n"
          "# normalized-SNR pick (-1 if none); the measurement BS has type bs*\n";
    const auto old_precision = os.precision(10);
    for (std::size_t b = 0; b < r.bs_points.size(); ++b)
        os << (static_cast<int>(b) == r.measurement_bs ? "bs*" : "bs") << ' ' << b << ' ' << r.bs_points[b].x << ' '
           << r.bs_points[b].y << " -1 " << r.involved_per_bs[b] << ' ' << r.scheduled[b] << " 0\n";
    for (std::size_t u = 0; u < r.user_points.size(); ++u) {
        const int b = r.association[u];
        const bool is_scheduled = b >= 0 && r.scheduled[b] == static_cast<int>(u);
        os << "user " << u << ' ' << r.user_points[u].x << ' ' << r.user_points[u].y << ' ' << b << ' '
           << static_cast<int>(r.involved[u]) << ' ' << (is_scheduled ? 1 : 0) << ' ' << r.tx_power[u] << '\n';
    }
    os.precision(old_precision);
}

} // namespace uplink
