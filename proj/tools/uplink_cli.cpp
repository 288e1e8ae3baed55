#include "uplink/experiments.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

namespace {

void add_common(CLI::App& cmd, uplink::ExperimentSpec& spec, std::string& engines, std::string& out_path,
                std::optional<double>& window)
{
    cmd.add_option("--lambda-bs-per-km2", spec.params.lambda_bs_per_km2, "BS density per km^2")
        ->capture_default_str();
    cmd.add_option("--lambda-ue-per-km2", spec.params.lambda_ue_per_km2, "User density per km^2")
        ->capture_default_str();
    cmd.add_option("--alpha", spec.params.alpha, "Path-loss exponent (> 2)")->capture_default_str();
    cmd.add_option("--noise-dbm", spec.params.noise_dbm, "Noise power in dBm")->capture_default_str();
    cmd.add_option("--pu-dbm", spec.params.pu_dbm, "Maximum user transmit power in dBm")->capture_default_str();
    cmd.add_option("--rho-dbm", spec.params.rho_dbm, "Power-control target in dBm")->capture_default_str();
    cmd.add_option("--trials", spec.trials, "Monte Carlo trials")->capture_default_str();
    cmd.add_option("--seed", spec.seed, "Random seed")->capture_default_str();
    cmd.add_option("--window-radius-m", window, "Simulation window radius in metres");
    cmd.add_option("--engines", engines, "Comma-separated subset of analytic-1,analytic-2,sim")
        ->capture_default_str();
    cmd.add_option("--threads", spec.threads, "Worker threads (0 = all cores)")->capture_default_str();
    cmd.add_option("--out", out_path, "Output file (default stdout)");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Uplink cellular network SINR and scheduling-gain experiments"};
    app.require_subcommand(1);

    uplink::ExperimentSpec spec;
    std::string engines = "analytic-1,analytic-2,sim";
    std::string out_path;
    std::optional<double> window;
    std::string theta_grid = "-10:20:31";
    std::string lambda_grid = "0.02:200:41";
    std::string ratio_grid = "1:10:10";
    std::optional<int> n_max;

    struct Entry {
        const char* name;
        const char* help;
    };
    const Entry entries[] = {
        {"ccdf", "SINR CCDF per engine over a threshold grid"},
        {"rate", "Average rates and scheduling gain per engine"},
        {"gain", "Scheduling gain over a user-to-BS density ratio sweep"},
        {"validity", "Validity probabilities g1, g2 over a log-spaced BS density grid"},
        {"pmf", "Involved-user count PMFs"},
        {"dump-realization", "Plain-text table of one simulated realization"},
    };
    for (const Entry& e : entries) {
        CLI::App* cmd = app.add_subcommand(e.name, e.help);
        add_common(*cmd, spec, engines, out_path, window);
        const std::string name = e.name;
        if (name == "ccdf")
            cmd->add_option("--theta-db", theta_grid, "SINR threshold grid start:stop:count in dB")
                ->capture_default_str();
        if (name == "validity")
            cmd->add_option("--lambda-bs-grid", lambda_grid, "BS density grid start:stop:count per km^2 (log)")
                ->capture_default_str();
        if (name == "gain")
            cmd->add_option("--ratio-grid", ratio_grid, "User-to-BS density ratio grid start:stop:count")
                ->capture_default_str();
        if (name == "pmf")
            cmd->add_option("--n-max", n_max, "Largest user count listed");
        if (name == "dump-realization")
            cmd->add_option("--trial", spec.trial_index, "Trial index to realize")->capture_default_str();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0)
            return app.exit(e);
        std::fprintf(stderr, "error: invalid_argument: %s\n", e.what());
        return 2;
    }

    try {
        spec.command = uplink::parse_command(app.get_subcommands().front()->get_name());
        spec.engines = uplink::parse_engines(engines);
        spec.window_radius_m = window;
        spec.theta_db = uplink::Grid::parse(theta_grid);
        spec.lambda_bs_grid = uplink::Grid::parse(lambda_grid, true);
        spec.ratio_grid = uplink::Grid::parse(ratio_grid);
        spec.n_max = n_max;
        if (out_path.empty()) {
            uplink::run_experiment(spec, std::cout);
        } else {
            std::ofstream file(out_path);
            if (!file)
                throw uplink::ExperimentError("io_error", "cannot open '" + out_path + "' for writing");
            uplink::run_experiment(spec, file);
            if (!file.flush())
                throw uplink::ExperimentError("io_error", "failed writing '" + out_path + "'");
        }
    } catch (const std::exception& e) {
        const auto [code, message] = uplink::classify_error(e);
        std::fprintf(stderr, "error: %s: %s\n", code.c_str(), message.c_str());
        return 1;
    }
    return 0;
}
