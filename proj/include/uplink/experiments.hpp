#pragma once

#include "uplink/params.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace uplink {

inline constexpr const char* kVersion = "1.0.0";

enum class Command { Ccdf, Rate, Gain, Validity, Pmf, DumpRealization };
enum class Engine { Analytic1, Analytic2, Sim };

std::string to_string(Command c);
std::string to_string(Engine e);
Command parse_command(const std::string& name);
Engine parse_engine(const std::string& name);
/// Comma-separated engine names, e.g. "analytic-1,sim".
std::set<Engine> parse_engines(const std::string& list);

/// A start:stop:count grid, evenly spaced either linearly or logarithmically.
struct Grid {
    double start = 0.0;
    double stop = 0.0;
    int count = 1;
    bool logarithmic = false;

    static Grid parse(const std::string& text, bool logarithmic = false);
    std::vector<double> values() const;
    void validate() const;
    std::string describe() const;
};

/// Bad command line or experiment specification. `code` is a stable machine-readable tag.
class ExperimentError : public std::runtime_error {
public:
    ExperimentError(std::string code, const std::string& what)
        : std::runtime_error(what), code(std::move(code)) {}
    std::string code;
};

struct ExperimentSpec {
    Command command = Command::Ccdf;
    RawConfig params{};
    std::size_t trials = 10000;
    std::uint64_t seed = 1;
    std::optional<double> window_radius_m;
    unsigned threads = 0;
    std::set<Engine> engines{Engine::Analytic1, Engine::Analytic2, Engine::Sim};
    Grid theta_db{-10.0, 20.0, 31, false};
    Grid lambda_bs_grid{0.02, 200.0, 41, true}; // per km^2, validity sweep
    Grid ratio_grid{1.0, 10.0, 10, false};      // lambda_ue / lambda_bs, gain sweep
    std::optional<int> n_max;                    // pmf rows; default covers every column's support
    std::uint64_t trial_index = 0;               // dump-realization

    void validate() const;
};

/// Runs the experiment and writes its CSV (or realization table) with a `#` manifest header.
void run_experiment(const ExperimentSpec& spec, std::ostream& out);

/// Maps any exception escaping run_experiment to a (code, message) pair.
std::pair<std::string, std::string> classify_error(const std::exception& e);

} // namespace uplink
