#include "uplink/analytic.hpp"
#include "uplink/experiments.hpp"
#include "uplink/mcsim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace uplink;

namespace {

int failures = 0;

void report(int id, bool pass, const std::string& summary)
{
    std::printf("%s %d: %s\n", pass ? "PASS" : "FAIL", id, summary.c_str());
    std::fflush(stdout);
    if (!pass)
        ++failures;
}

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0, double d = 0.0)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, format, a, b, c, d);
    return buf;
}

NetworkParams defaults(double lambda_bs_km2, double lambda_ue_km2 = 8.0)
{
    RawConfig raw;
    raw.lambda_bs_per_km2 = lambda_bs_km2;
    raw.lambda_ue_per_km2 = lambda_ue_km2;
    return make_params(raw);
}

NetworkParams simplest()
{
    RawConfig raw;
    raw.pu_dbm = 60.0;
    return make_params(raw).with_noise_power(0.0);
}

SimulationConfig sim_config(std::uint64_t seed)
{
    SimulationConfig cfg;
    cfg.trials = 10000;
    cfg.seed = seed;
    return cfg;
}

std::vector<double> db_grid(double start, double stop, double step)
{
    std::vector<double> out;
    for (double db = start; db <= stop + 1e-9; db += step)
        out.push_back(db_to_linear(db));
    return out;
}

struct RegimeRun {
    double lambda_km2;
    NetworkParams params;
    SimulationSummary sim;
};

void criterion_validity()
{
    const double g1_20 = validity_g1(defaults(20.0));
    const double g1_2 = validity_g1(defaults(2.0));
    const double g2_2 = validity_g2(defaults(2.0));
    const double g2_02 = validity_g2(defaults(0.2));
    const bool pass = std::abs(g1_20 - 0.940) <= 1e-3 && std::abs(g1_2 - 0.245) <= 1e-3 &&
                      std::abs(g2_2 - 0.325) <= 1e-3 && std::abs(g2_02 - 0.894) <= 1e-3;
    report(1, pass,
           fmt("validity probabilities g1(20)=%.4f g1(2)=%.4f g2(2)=%.4f g2(0.2)=%.4f", g1_20, g1_2, g2_2, g2_02));
}

double max_gap(const CcdfCurve& a, const CcdfCurve& b)
{
    double gap = 0.0;
    for (std::size_t i = 0; i < a.points.size(); ++i)
        gap = std::max(gap, std::abs(a.points[i].prob - b.points[i].prob));
    return gap;
}

void criterion_regimes(const RegimeRun& dense, const RegimeRun& middle, const RegimeRun& sparse)
{
    const std::vector<double> grid = db_grid(-10.0, 20.0, 1.0);
    const double gap_dense =
        max_gap(empirical_ccdf(dense.sim, grid), analytic_ccdf(grid, UserCountModel::voronoi(dense.params)));
    const double gap_sparse =
        max_gap(empirical_ccdf(sparse.sim, grid), analytic_ccdf(grid, UserCountModel::range(sparse.params)));
    const CcdfCurve mid_sim = empirical_ccdf(middle.sim, grid);
    const double gap_mid_1 = max_gap(mid_sim, analytic_ccdf(grid, UserCountModel::voronoi(middle.params)));
    const double gap_mid_2 = max_gap(mid_sim, analytic_ccdf(grid, UserCountModel::range(middle.params)));
    const bool pass = gap_dense < 0.02 && gap_sparse < 0.02 && gap_mid_1 > 0.02 && gap_mid_2 > 0.02;
    report(2, pass,
           fmt("CCDF regimes: max gap lambda=20/fN1 %.4f, lambda=0.2/fN2 %.4f (< 0.02); lambda=2 gaps %.4f, %.4f (> 0.02)",
               gap_dense, gap_sparse, gap_mid_1, gap_mid_2));
}

void criterion_supremum(const RegimeRun& dense, const RegimeRun& sparse)
{
    const std::vector<double> theta{db_to_linear(-40.0)};
    struct Case {
        const RegimeRun* run;
        UserCountModel model;
        const char* name;
    };
    const Case cases[] = {{&dense, UserCountModel::voronoi(dense.params), "lambda=20/fN1"},
                          {&sparse, UserCountModel::range(sparse.params), "lambda=0.2/fN2"}};
    bool pass = true;
    std::string detail;
    for (const Case& c : cases) {
        const double limit = 1.0 - c.model.f0();
        const double analytic = marginal_ccdf(SinrThreshold(theta[0]), c.model);
        const double empirical = empirical_ccdf(c.run->sim, theta).points[0].prob;
        const bool ok = std::abs(analytic - limit) <= 1e-6 && std::abs(empirical - limit) <= 0.01;
        pass = pass && ok;
        detail += std::string(" ") + c.name +
                  fmt(": 1-f(0)=%.6f analytic gap %.2e (<= 1e-6), empirical gap %.4f (<= 0.01);", limit,
                      std::abs(analytic - limit), std::abs(empirical - limit));
    }
    report(3, pass, "supremum at -40 dB:" + detail);
}

void criterion_closed_form()
{
    const NetworkParams p = simplest();
    double worst = 0.0;
    for (double f0 : {0.0, 0.3}) {
        for (int n = 1; n <= 30; ++n) {
            for (double db = -10.0; db <= 20.0 + 1e-9; db += 1.0) {
                const SinrThreshold t = SinrThreshold::from_db(db);
                worst = std::max(worst, std::abs(conditional_ccdf(t, n, p, f0) - conditional_ccdf_closed_form(t, n, f0)));
            }
        }
    }
    report(4, p.bs_in_range() > 40.0 && worst <= 1e-8,
           fmt("closed-form regime (pi lambda R^2 = %.1f): max |general - closed form| = %.2e over n=1..30, -10..20 dB",
               p.bs_in_range(), worst));
}

void criterion_single_user()
{
    const NetworkParams p = simplest();
    double worst = 0.0;
    for (double db = -20.0; db <= 30.0 + 1e-9; db += 0.5) {
        const double t = db_to_linear(db);
        const double expected = std::exp(-std::sqrt(t) * std::atan(std::sqrt(t)));
        worst = std::max(worst, std::abs(conditional_ccdf(SinrThreshold(t), 1, p, 0.0) - expected));
    }
    report(5, worst <= 1e-8, fmt("n=1 reduces to exp(-sqrt(t) atan(sqrt(t))): max error %.2e", worst));
}

void criterion_identities()
{
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> alpha_dist(2.05, 8.0);
    std::uniform_real_distribution<double> log_theta(-4.0, 4.0);
    double worst_identity = 0.0;
    for (int i = 0; i < 200; ++i) {
        const double alpha = alpha_dist(rng);
        const double theta = std::pow(10.0, log_theta(rng));
        const double integral = interference_exponent_integral(theta, alpha);
        const double hyper = gauss_2f1_special(theta, alpha) * std::pow(theta, 1.0 - 2.0 / alpha) / (alpha - 2.0);
        worst_identity = std::max(worst_identity, std::abs(integral - hyper) / std::abs(hyper));
    }
    double worst_gamma = 0.0;
    for (double b = 0.0; b <= 60.0; b += 0.05)
        worst_gamma =
            std::max(worst_gamma, std::abs(lower_incomplete_gamma(2.0, b) - (-std::expm1(-b) - b * std::exp(-b))));
    double worst_sum = 0.0;
    for (double x : {0.01, 0.2, 0.5, 0.8, 0.99}) {
        const double q = 1.0 - x;
        for (int n = 1; n <= 100; ++n) {
            const double s = alternating_binomial_sum(
                n, [q](int k) { return std::pow(q, k); }, [q](int k) { return Extended(pow(Extended(q), k)); });
            worst_sum = std::max(worst_sum, std::abs(s - (1.0 - std::pow(x, n))));
        }
    }
    const bool pass = worst_identity <= 1e-8 && worst_gamma <= 1e-12 && worst_sum <= 1e-10;
    report(6, pass,
           fmt("identities: integral vs hypergeometric %.2e (200 draws), gamma(2,b) %.2e, alternating sum %.2e (n<=100)",
               worst_identity, worst_gamma, worst_sum));
}

struct PairedGain {
    double gain;
    double std_error;
};

// Ratio of means of paired per-trial rates, with a delta-method standard error.
PairedGain simulated_gain(const SimulationSummary& sim)
{
    const std::size_t n = sim.trials.size();
    std::vector<double> a(n), b(n);
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const TrialOutcome& t = sim.trials[i];
        a[i] = t.sinr_scheduled ? std::log1p(*t.sinr_scheduled) : 0.0;
        b[i] = t.sinr_round_robin ? std::log1p(*t.sinr_round_robin) : 0.0;
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    const double g = ma / mb;
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = a[i] - g * b[i];
        var += r * r;
    }
    var /= (n - 1);
    return {g, std::sqrt(var / n) / mb};
}

void criterion_gain()
{
    const NetworkParams base = defaults(20.0);
    bool increasing = true;
    bool within = true;
    bool above_one = true;
    double previous = 0.0;
    double worst_rel = 0.0;
    double lowest_margin = INFINITY;
    std::string rows;
    for (int ratio = 1; ratio <= 10; ++ratio) {
        const NetworkParams p = base.with_lambda_ue(ratio * base.lambda_bs());
        const double analytic = scheduling_gain(UserCountModel::voronoi(p)).gain.value();
        const PairedGain sim = simulated_gain(run_simulation(p, sim_config(700 + ratio)));
        increasing = increasing && analytic > previous;
        previous = analytic;
        const double rel = std::abs(sim.gain - analytic) / analytic;
        worst_rel = std::max(worst_rel, rel);
        within = within && rel <= 0.05;
        const double margin = sim.gain - (1.0 - 2.0 * sim.std_error);
        lowest_margin = std::min(lowest_margin, margin);
        above_one = above_one && margin >= 0.0;
        rows += fmt(" %.0f:%.3f/%.3f", ratio, analytic, sim.gain);
    }
    report(7, increasing && within && above_one,
           fmt("gain sweep at lambda=20: analytic strictly increasing=%.0f, worst relative gap %.4f (<= 0.05), "
               "min(G_sim - 1 + 2 se) = %.3f (>= 0);",
               increasing ? 1.0 : 0.0, worst_rel, lowest_margin) +
               " ratio:analytic/sim" + rows);
}

void criterion_layer_cake()
{
    const UserCountModel models[] = {UserCountModel::voronoi(defaults(20.0)), UserCountModel::range(defaults(0.2)),
                                     UserCountModel::voronoi(defaults(20.0, 120.0))};
    double worst = 0.0;
    for (const UserCountModel& m : models)
        worst = std::max(worst, std::abs(rate_scheduled(m) - rate_by_layer_cake(m)));
    report(8, worst <= 1e-6, fmt("rate vs integrated CCDF over three parameter sets: max difference %.2e", worst));
}

void criterion_determinism()
{
    bool pass = true;
    std::string detail;
    for (Command c : {Command::Ccdf, Command::Rate, Command::Gain, Command::Validity, Command::Pmf,
                      Command::DumpRealization}) {
        ExperimentSpec spec;
        spec.command = c;
        spec.trials = 2000;
        spec.seed = 31337;
        spec.ratio_grid = Grid{1.0, 10.0, 4, false};
        std::string outputs[3];
        const unsigned threads[3] = {1, 3, 8};
        for (int i = 0; i < 3; ++i) {
            spec.threads = threads[i];
            std::ostringstream os;
            run_experiment(spec, os);
            outputs[i] = os.str();
        }
        const bool same = outputs[0] == outputs[1] && outputs[1] == outputs[2];
        pass = pass && same;
        detail += " " + to_string(c) + (same ? "=identical" : "=DIFFERENT");
    }
    report(9, pass, "byte-identical CSV for threads 1, 3, 8:" + detail);
}

void criterion_laplace(const RegimeRun& dense, const RegimeRun& sparse)
{
    bool pass = true;
    std::string detail;
    for (const RegimeRun* run : {&sparse, &dense}) {
        const UserCountModel emp = empirical_user_count(run->sim);
        const UserCountModel model =
            run == &dense ? UserCountModel::voronoi(run->params) : UserCountModel::range(run->params);
        for (double db : {0.0, 10.0}) {
            const double s = db_to_linear(db) / run->params.rho_target();
            const Estimate mc = empirical_laplace(run->sim, s);
            const double analytic = laplace_interference(s, run->params, emp.f0());
            const double with_model = laplace_interference(s, run->params, model.f0());
            const double rel = std::abs(mc.mean - analytic) / analytic;
            pass = pass && rel <= 0.02;
            detail += fmt(" lambda=%g theta=%gdB: MC %.4f analytic %.4f", run->lambda_km2, db, mc.mean, analytic) +
                      fmt(" rel %.4f (with model f(0): %.4f);", rel, with_model);
        }
    }
    report(10, pass, "Laplace transform of interference, fN0 from the simulated cells, within 2%:" + detail);
}

} // namespace

int main()
{
    std::printf("acceptance suite: 10 criteria\n");
    criterion_validity();
    criterion_closed_form();
    criterion_single_user();
    criterion_identities();
    criterion_layer_cake();

    const NetworkParams p20 = defaults(20.0);
    const NetworkParams p2 = defaults(2.0);
    const NetworkParams p02 = defaults(0.2);
    const RegimeRun dense{20.0, p20, run_simulation(p20, sim_config(101))};
    const RegimeRun middle{2.0, p2, run_simulation(p2, sim_config(102))};
    const RegimeRun sparse{0.2, p02, run_simulation(p02, sim_config(103))};
    criterion_regimes(dense, middle, sparse);
    criterion_supremum(dense, sparse);
    criterion_gain();
    criterion_determinism();
    criterion_laplace(dense, sparse);

    std::printf("acceptance: %d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
