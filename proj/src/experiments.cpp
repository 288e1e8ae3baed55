#include "uplink/experiments.hpp"

#include "uplink/analytic.hpp"
#include "uplink/mcsim.hpp"
#include "uplink/usercount.hpp"

#include <boost/version.hpp>
#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace uplink {

std::string to_string(Command c)
{
    switch (c) {
    case Command::Ccdf: return "ccdf";
    case Command::Rate: return "rate";
    case Command::Gain: return "gain";
    case Command::Validity: return "validity";
    case Command::Pmf: return "pmf";
    case Command::DumpRealization: return "dump-realization";
    }
    return "unknown";
}

std::string to_string(Engine e)
{
    switch (e) {
    case Engine::Analytic1: return "analytic-1";
    case Engine::Analytic2: return "analytic-2";
    case Engine::Sim: return "sim";
    }
    return "unknown";
}

Command parse_command(const std::string& name)
{
    for (Command c : {Command::Ccdf, Command::Rate, Command::Gain, Command::Validity, Command::Pmf,
                      Command::DumpRealization})
        if (to_string(c) == name)
            return c;
    throw ExperimentError("invalid_argument", "unknown command '" + name + "'");
}

Engine parse_engine(const std::string& name)
{
    for (Engine e : {Engine::Analytic1, Engine::Analytic2, Engine::Sim})
        if (to_string(e) == name)
            return e;
    throw ExperimentError("invalid_argument", "unknown engine '" + name + "' (expected analytic-1, analytic-2 or sim)");
}

std::set<Engine> parse_engines(const std::string& list)
{
    std::set<Engine> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty())
            out.insert(parse_engine(item));
    if (out.empty())
        throw ExperimentError("invalid_argument", "engine list is empty");
    return out;
}

Grid Grid::parse(const std::string& text, bool logarithmic)
{
    Grid g;
    g.logarithmic = logarithmic;
    const auto first = text.find(':');
    const auto second = first == std::string::npos ? std::string::npos : text.find(':', first + 1);
    if (second == std::string::npos)
        throw ExperimentError("invalid_argument", "grid '" + text + "' is not of the form start:stop:count");
    try {
        std::size_t used = 0;
        const std::string a = text.substr(0, first);
        const std::string b = text.substr(first + 1, second - first - 1);
        const std::string c = text.substr(second + 1);
        g.start = std::stod(a, &used);
        if (used != a.size())
            throw std::invalid_argument(a);
        g.stop = std::stod(b, &used);
        if (used != b.size())
            throw std::invalid_argument(b);
        g.count = std::stoi(c, &used);
        if (used != c.size())
            throw std::invalid_argument(c);
    } catch (const std::logic_error&) {
        throw ExperimentError("invalid_argument", "grid '" + text + "' has a malformed number");
    }
    g.validate();
    return g;
}

void Grid::validate() const
{
    if (count < 1)
        throw ExperimentError("invalid_argument", "grid " + describe() + " must have at least one point");
    if (!std::isfinite(start) || !std::isfinite(stop))
        throw ExperimentError("invalid_argument", "grid " + describe() + " has non-finite ends");
    if (logarithmic && !(start > 0.0 && stop > 0.0))
        throw ExperimentError("invalid_argument", "logarithmic grid " + describe() + " needs positive ends");
}

std::vector<double> Grid::values() const
{
    std::vector<double> out(count);
    for (int i = 0; i < count; ++i) {
        const double t = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
        out[i] = logarithmic ? start * std::pow(stop / start, t) : start + (stop - start) * t;
    }
    return out;
}

std::string Grid::describe() const
{
    std::ostringstream os;
    os << start << ':' << stop << ':' << count << (logarithmic ? " (log)" : "");
    return os.str();
}

void ExperimentSpec::validate() const
{
    if (engines.empty())
        throw ExperimentError("invalid_argument", "at least one engine is required");
    if (trials < 1)
        throw ExperimentError("invalid_parameter", "trials must be at least 1");
    if (n_max && *n_max < 0)
        throw ExperimentError("invalid_argument", "n-max must be non-negative");
    theta_db.validate();
    lambda_bs_grid.validate();
    ratio_grid.validate();
    if (window_radius_m && !(*window_radius_m > 0.0))
        throw ExperimentError("invalid_parameter", "window radius must be positive");
}

namespace {

std::string num(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

bool has(const ExperimentSpec& spec, Engine e) { return spec.engines.count(e) > 0; }

SimulationConfig sim_config(const ExperimentSpec& spec)
{
    SimulationConfig cfg;
    cfg.trials = spec.trials;
    cfg.window_radius = spec.window_radius_m;
    cfg.seed = spec.seed;
    cfg.threads = spec.threads;
    return cfg;
}

AnalyticOptions analytic_options(const ExperimentSpec& spec)
{
    AnalyticOptions opts;
    opts.threads = spec.threads;
    return opts;
}

void write_manifest(const ExperimentSpec& spec, const NetworkParams& p, std::ostream& out)
{
    const SimulationConfig cfg = sim_config(spec);
    out << "# uplink " << kVersion << " command=" << to_string(spec.command) << '\n';
    out << "# lambda_bs_per_m2=" << num(p.lambda_bs()) << " lambda_ue_per_m2=" << num(p.lambda_ue())
        << " alpha=" << num(p.alpha()) << '\n';
    out << "# noise_power_w=" << num(p.noise_power() * 1e-3) << " p_max_w=" << num(p.p_max() * 1e-3)
        << " rho_target_w=" << num(p.rho_target() * 1e-3) << " achievable_radius_m=" << num(p.achievable_radius())
        << '\n';
    out << "# seed=" << spec.seed << " trials=" << spec.trials;
    if (spec.command != Command::Validity && p.lambda_bs() > 0.0)
        out << " window_radius_m=" << num(cfg.resolved_window(p));
    out << '\n';
    out << "# engines=";
    bool first = true;
    for (Engine e : spec.engines) {
        out << (first ? "" : ",") << to_string(e);
        first = false;
    }
    out << " analytic_engine=" << kVersion << " sim_engine=" << kVersion << " boost=" << BOOST_VERSION / 100000
        << '.' << BOOST_VERSION / 100 % 1000 << '.' << BOOST_VERSION % 100 << " mpfr=" << mpfr_get_version() << '\n';
    switch (spec.command) {
    case Command::Ccdf: out << "# theta_db_grid=" << spec.theta_db.describe() << '\n'; break;
    case Command::Validity: out << "# lambda_bs_per_km2_grid=" << spec.lambda_bs_grid.describe() << '\n'; break;
    case Command::Gain: out << "# ratio_grid=" << spec.ratio_grid.describe() << '\n'; break;
    case Command::DumpRealization: out << "# trial_index=" << spec.trial_index << '\n'; break;
    default: break;
    }
}

void run_ccdf(const ExperimentSpec& spec, const NetworkParams& p, std::ostream& out)
{
    std::vector<double> thetas;
    for (double db : spec.theta_db.values())
        thetas.push_back(db_to_linear(db));
    const AnalyticOptions opts = analytic_options(spec);
    std::optional<CcdfCurve> a1, a2, sim;
    if (has(spec, Engine::Analytic1))
        a1 = analytic_ccdf(thetas, UserCountModel::voronoi(p), opts);
    if (has(spec, Engine::Analytic2))
        a2 = analytic_ccdf(thetas, UserCountModel::range(p), opts);
    if (has(spec, Engine::Sim))
        sim = empirical_ccdf(run_simulation(p, sim_config(spec)), thetas);
    out << "theta_db,analytic_fn1,analytic_fn2,sim_mean,sim_stderr\n";
    const std::vector<double> dbs = spec.theta_db.values();
    for (std::size_t i = 0; i < thetas.size(); ++i) {
        out << num(dbs[i]) << ',' << (a1 ? num(a1->points[i].prob) : "") << ','
            << (a2 ? num(a2->points[i].prob) : "") << ',' << (sim ? num(sim->points[i].prob) : "") << ','
            << (sim ? num(sim->points[i].std_error) : "") << '\n';
    }
}

std::string optional_num(const std::optional<double>& x) { return x ? num(*x) : ""; }

void run_rate(const ExperimentSpec& spec, const NetworkParams& p, std::ostream& out)
{
    out << "engine,rate_scheduled,rate_round_robin,gain,rate_scheduled_stderr,rate_round_robin_stderr\n";
    auto row = [&](const std::string& name, const RateReport& r) {
        out << name << ',' << num(r.rate_scheduled) << ',' << num(r.rate_round_robin) << ',' << optional_num(r.gain)
            << ',' << optional_num(r.rate_scheduled_stderr) << ',' << optional_num(r.rate_round_robin_stderr)
            << '\n';
    };
    const AnalyticOptions opts = analytic_options(spec);
    if (has(spec, Engine::Analytic1))
        row(to_string(Engine::Analytic1), scheduling_gain(UserCountModel::voronoi(p), opts));
    if (has(spec, Engine::Analytic2))
        row(to_string(Engine::Analytic2), scheduling_gain(UserCountModel::range(p), opts));
    if (has(spec, Engine::Sim))
        row(to_string(Engine::Sim), empirical_rates(run_simulation(p, sim_config(spec))));
}

// The analytic model for the gain sweep: the enabled model with the larger validity
// probability.
std::optional<UserCountModel> gain_model(const ExperimentSpec& spec, const NetworkParams& p)
{
    const bool one = has(spec, Engine::Analytic1);
    const bool two = has(spec, Engine::Analytic2);
    if (one && (!two || validity_g1(p) >= validity_g2(p)))
        return UserCountModel::voronoi(p);
    if (two)
        return UserCountModel::range(p);
    return std::nullopt;
}

void run_gain(const ExperimentSpec& spec, const NetworkParams& p, std::ostream& out)
{
    out << "ratio,gain_analytic,gain_sim\n";
    const AnalyticOptions opts = analytic_options(spec);
    for (double ratio : spec.ratio_grid.values()) {
        if (!(ratio >= 0.0))
            throw ExperimentError("invalid_argument", "user-to-BS density ratio must be non-negative");
        const NetworkParams q = p.with_lambda_ue(ratio * p.lambda_bs());
        std::optional<double> analytic;
        if (const auto model = gain_model(spec, q))
            analytic = scheduling_gain(*model, opts).gain;
        std::optional<double> sim;
        if (has(spec, Engine::Sim))
            sim = empirical_rates(run_simulation(q, sim_config(spec))).gain;
        out << num(ratio) << ',' << optional_num(analytic) << ',' << optional_num(sim) << '\n';
    }
}

void run_validity(const ExperimentSpec& spec, const NetworkParams& p, std::ostream& out)
{
    out << "lambda_bs,g1,g2\n";
    for (double lambda : spec.lambda_bs_grid.values()) {
        const NetworkParams q = p.with_lambda_bs(per_km2_to_per_m2(lambda));
        out << num(lambda) << ',' << num(validity_g1(q)) << ',' << num(validity_g2(q)) << '\n';
    }
}

void run_pmf(const ExperimentSpec& spec, const NetworkParams& p, std::ostream& out)
{
    std::optional<UserCountModel> m1, m2, emp;
    if (has(spec, Engine::Analytic1))
        m1 = UserCountModel::voronoi(p);
    if (has(spec, Engine::Analytic2))
        m2 = UserCountModel::range(p);
    if (has(spec, Engine::Sim))
        emp = empirical_user_count(run_simulation(p, sim_config(spec)));
    int n_max = 0;
    if (spec.n_max) {
        n_max = *spec.n_max;
    } else {
        for (const auto* m : {&m1, &m2, &emp})
            if (*m)
                n_max = std::max(n_max, (*m)->truncation_support(1e-9));
    }
    out << "n,f_n1,f_n2,empirical\n";
    auto cell = [](const std::optional<UserCountModel>& m, int n) { return m ? num(m->pmf(n)) : std::string(); };
    for (int n = 0; n <= n_max; ++n)
        out << n << ',' << cell(m1, n) << ',' << cell(m2, n) << ',' << cell(emp, n) << '\n';
}

void run_dump(const ExperimentSpec& spec, const NetworkParams& p, std::ostream& out)
{
    const SimulationConfig cfg = sim_config(spec);
    cfg.validate(p);
    write_realization(out, sample_realization(p, cfg, spec.trial_index));
}

} // namespace

void run_experiment(const ExperimentSpec& spec, std::ostream& out)
{
    spec.validate();
    const NetworkParams p = make_params(spec.params);
    const bool needs_bs = spec.command != Command::Validity;
    if (needs_bs && p.lambda_bs() == 0.0)
        throw ParameterError("BS density must be positive for " + to_string(spec.command));
    if (needs_bs && (has(spec, Engine::Sim) || spec.command == Command::DumpRealization))
        sim_config(spec).validate(p);

    std::ostringstream body;
    write_manifest(spec, p, body);
    switch (spec.command) {
    case Command::Ccdf: run_ccdf(spec, p, body); break;
    case Command::Rate: run_rate(spec, p, body); break;
    case Command::Gain: run_gain(spec, p, body); break;
    case Command::Validity: run_validity(spec, p, body); break;
    case Command::Pmf: run_pmf(spec, p, body); break;
    case Command::DumpRealization: run_dump(spec, p, body); break;
    }
    out << body.str();
}

std::pair<std::string, std::string> classify_error(const std::exception& e)
{
    if (const auto* x = dynamic_cast<const ExperimentError*>(&e))
        return {x->code, x->what()};
    if (const auto* x = dynamic_cast<const PathLossExponentError*>(&e))
        return {"invalid_path_loss_exponent", x->what()};
    if (const auto* x = dynamic_cast<const ParameterError*>(&e))
        return {"invalid_parameter", x->what()};
    if (const auto* x = dynamic_cast<const PrecisionError*>(&e))
        return {"precision_lost", x->what()};
    if (const auto* x = dynamic_cast<const QuadratureError*>(&e))
        return {"quadrature_failed", x->what()};
    if (const auto* x = dynamic_cast<const DomainError*>(&e))
        return {"domain_error", x->what()};
    return {"internal_error", e.what()};
}

} // namespace uplink
