#include "uplink/experiments.hpp"

#include <doctest.h>

#include <cmath>
#include <map>
#include <sstream>

using namespace uplink;

namespace {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> comments;

    std::size_t column(const std::string& name) const
    {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name)
                return i;
        throw std::out_of_range(name);
    }
    double value(std::size_t row, const std::string& name) const { return std::stod(rows.at(row).at(column(name))); }
    std::string cell(std::size_t row, const std::string& name) const { return rows.at(row).at(column(name)); }
};

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ','))
        out.push_back(cell);
    if (!line.empty() && line.back() == ',')
        out.emplace_back();
    return out;
}

std::string run(const ExperimentSpec& spec)
{
    std::ostringstream os;
    run_experiment(spec, os);
    return os.str();
}

Table parse(const std::string& csv)
{
    Table t;
    std::istringstream in(csv);
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("#", 0) == 0)
            t.comments.push_back(line);
        else if (t.header.empty())
            t.header = split(line);
        else
            t.rows.push_back(split(line));
    }
    return t;
}

ExperimentSpec spec_for(Command c)
{
    ExperimentSpec s;
    s.command = c;
    s.trials = 300;
    return s;
}

} // namespace

TEST_CASE("grid parsing and spacing")
{
    const Grid g = Grid::parse("-10:20:4");
    CHECK(g.values() == std::vector<double>{-10.0, 0.0, 10.0, 20.0});
    const Grid l = Grid::parse("0.2:20:3", true);
    const auto v = l.values();
    CHECK(v[1] == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(Grid::parse("5:9:1").values() == std::vector<double>{5.0});
    CHECK_THROWS_AS(Grid::parse("1:2"), ExperimentError);
    CHECK_THROWS_AS(Grid::parse("a:2:3"), ExperimentError);
    CHECK_THROWS_AS(Grid::parse("1:2:0"), ExperimentError);
    CHECK_THROWS_AS(Grid::parse("0:2:3", true), ExperimentError);
}

TEST_CASE("engine and command names")
{
    CHECK(parse_engines("sim,analytic-2") == std::set<Engine>{Engine::Analytic2, Engine::Sim});
    CHECK_THROWS_AS(parse_engines(""), ExperimentError);
    CHECK_THROWS_AS(parse_engines("analytic-3"), ExperimentError);
    CHECK(parse_command("dump-realization") == Command::DumpRealization);
    CHECK_THROWS_AS(parse_command("plot"), ExperimentError);
}

TEST_CASE("validity sweep")
{
    ExperimentSpec s = spec_for(Command::Validity);
    s.lambda_bs_grid = Grid{0.02, 200.0, 41, true};
    const Table t = parse(run(s));
    CHECK(t.header == std::vector<std::string>{"lambda_bs", "g1", "g2"});
    REQUIRE(t.rows.size() == 41);
    std::map<long, std::size_t> index;
    for (std::size_t i = 0; i < t.rows.size(); ++i)
        index[std::lround(t.value(i, "lambda_bs") * 100)] = i;
    CHECK(std::abs(t.value(index.at(2000), "g1") - 0.940) <= 1e-3);
    CHECK(std::abs(t.value(index.at(20), "g2") - 0.894) <= 1e-3);
    s.lambda_bs_grid = Grid{1e-6, 1e-5, 2, true};
    const Table tiny = parse(run(s));
    CHECK(tiny.value(0, "g1") < 1e-6);
    CHECK(tiny.value(0, "g2") > 1.0 - 1e-5);
}

TEST_CASE("manifest records resolved parameters, seed and versions")
{
    ExperimentSpec s = spec_for(Command::Ccdf);
    s.seed = 4242;
    s.theta_db = Grid{0.0, 0.0, 1, false};
    s.engines = {Engine::Analytic1};
    const Table t = parse(run(s));
    std::string all;
    for (const auto& c : t.comments)
        all += c + "\n";
    CHECK(all.find("seed=4242") != std::string::npos);
    CHECK(all.find("lambda_bs_per_m2=2e-05") != std::string::npos);
    CHECK(all.find("noise_power_w=1e-12") != std::string::npos);
    CHECK(all.find("achievable_radius_m=211.348904") != std::string::npos);
    CHECK(all.find("analytic_engine=") != std::string::npos);
    CHECK(all.find("mpfr=") != std::string::npos);
}

TEST_CASE("CCDF table columns and absent engines")
{
    ExperimentSpec s = spec_for(Command::Ccdf);
    s.theta_db = Grid{-10.0, 20.0, 4, false};
    s.engines = {Engine::Analytic2};
    const Table t = parse(run(s));
    CHECK(t.header ==
          std::vector<std::string>{"theta_db", "analytic_fn1", "analytic_fn2", "sim_mean", "sim_stderr"});
    REQUIRE(t.rows.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(t.cell(i, "analytic_fn1").empty());
        CHECK(t.cell(i, "sim_mean").empty());
        CHECK(!t.cell(i, "analytic_fn2").empty());
    }
    CHECK(t.value(0, "analytic_fn2") > t.value(3, "analytic_fn2"));
}

TEST_CASE("CCDF with no users is zero in every column")
{
    ExperimentSpec s = spec_for(Command::Ccdf);
    s.params.lambda_ue_per_km2 = 0.0;
    s.theta_db = Grid{-10.0, 20.0, 3, false};
    const Table t = parse(run(s));
    for (std::size_t i = 0; i < t.rows.size(); ++i)
        for (const char* c : {"analytic_fn1", "analytic_fn2", "sim_mean"})
            CHECK(t.value(i, c) == 0.0);
}

TEST_CASE("PMF columns each sum to one")
{
    ExperimentSpec s = spec_for(Command::Pmf);
    const Table t = parse(run(s));
    CHECK(t.header == std::vector<std::string>{"n", "f_n1", "f_n2", "empirical"});
    for (const char* c : {"f_n1", "f_n2", "empirical"}) {
        double sum = 0.0;
        for (std::size_t i = 0; i < t.rows.size(); ++i)
            sum += t.value(i, c);
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
    }
    s.params.lambda_ue_per_km2 = 0.0;
    const Table empty = parse(run(s));
    CHECK(empty.value(0, "f_n1") == 1.0);
    CHECK(empty.value(0, "f_n2") == 1.0);
    CHECK(empty.value(0, "empirical") == 1.0);
}

TEST_CASE("analytic gain sweep")
{
    ExperimentSpec dense = spec_for(Command::Gain);
    dense.engines = {Engine::Analytic1, Engine::Analytic2};
    const Table hi = parse(run(dense));
    CHECK(hi.header == std::vector<std::string>{"ratio", "gain_analytic", "gain_sim"});
    REQUIRE(hi.rows.size() == 10);
    for (std::size_t i = 1; i < hi.rows.size(); ++i)
        CHECK(hi.value(i, "gain_analytic") > hi.value(i - 1, "gain_analytic"));
    CHECK(hi.cell(0, "gain_sim").empty());

    ExperimentSpec sparse = dense;
    sparse.params.lambda_bs_per_km2 = 0.2;
    const Table lo = parse(run(sparse));
    for (std::size_t i = 0; i < lo.rows.size(); ++i)
        CHECK(lo.value(i, "gain_analytic") < hi.value(i, "gain_analytic"));

    dense.ratio_grid = Grid{1e-4, 1e-4, 1, false};
    CHECK(parse(run(dense)).value(0, "gain_analytic") == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("rate table")
{
    ExperimentSpec s = spec_for(Command::Rate);
    const Table t = parse(run(s));
    REQUIRE(t.rows.size() == 3);
    CHECK(t.rows[0][0] == "analytic-1");
    CHECK(t.rows[2][0] == "sim");
    CHECK(t.value(0, "gain") == doctest::Approx(t.value(0, "rate_scheduled") / t.value(0, "rate_round_robin")));
    CHECK(t.cell(0, "rate_scheduled_stderr").empty());
    CHECK(!t.cell(2, "rate_scheduled_stderr").empty());
}

TEST_CASE("outputs are identical across thread counts")
{
    for (Command c : {Command::Ccdf, Command::Gain, Command::Pmf, Command::Rate}) {
        ExperimentSpec a = spec_for(c);
        a.trials = 200;
        a.ratio_grid = Grid{1.0, 4.0, 2, false};
        a.theta_db = Grid{-10.0, 20.0, 7, false};
        a.threads = 1;
        ExperimentSpec b = a;
        b.threads = 7;
        CHECK(run(a) == run(b));
    }
}

TEST_CASE("realization dump")
{
    ExperimentSpec s = spec_for(Command::DumpRealization);
    s.trial_index = 3;
    const std::string out = run(s);
    CHECK(out.find("bs* ") != std::string::npos);
    CHECK(out.find("user ") != std::string::npos);
    CHECK(out == run(s));
}

TEST_CASE("errors carry machine-readable codes")
{
    ExperimentSpec s = spec_for(Command::Ccdf);
    s.params.alpha = 2.0;
    try {
        run(s);
        FAIL("expected an exception");
    } catch (const std::exception& e) {
        CHECK(classify_error(e).first == "invalid_path_loss_exponent");
    }
    s = spec_for(Command::Ccdf);
    s.params.lambda_bs_per_km2 = 0.0;
    try {
        run(s);
        FAIL("expected an exception");
    } catch (const std::exception& e) {
        CHECK(classify_error(e).first == "invalid_parameter");
    }
    s = spec_for(Command::Ccdf);
    s.engines.clear();
    CHECK_THROWS_AS(run(s), ExperimentError);
    s = spec_for(Command::Ccdf);
    s.window_radius_m = 100.0;
    CHECK_THROWS_AS(run(s), ParameterError);
}
