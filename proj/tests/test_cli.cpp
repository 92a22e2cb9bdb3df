#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli/commands.hpp"
#include "padland/errors.hpp"
#include "padland/evolution.hpp"
#include "padland/survival.hpp"

using namespace padland;
using namespace padland::cli;
using doctest::Approx;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(const std::vector<std::string>& args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> row;
        std::string field;
        std::istringstream fields(line);
        while (std::getline(fields, field, ',')) {
            row.push_back(field);
        }
        if (!line.empty() && line.back() == ',') {
            row.emplace_back();
        }
        rows.push_back(row);
    }
    return rows;
}

std::string column(const std::vector<std::vector<std::string>>& rows, std::size_t row, const std::string& name) {
    const auto& header = rows.at(0);
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) {
            return rows.at(row).at(i);
        }
    }
    FAIL("missing column " << name);
    return {};
}

std::filesystem::path scratch(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "padland_cli_test";
    std::filesystem::create_directories(dir);
    return dir / name;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream(path) << text;
}

} // namespace

TEST_CASE("kernel table") {
    const auto r = run({"kernel", "--family", "linear", "--p", "2", "--n", "1", "--alpha", "2", "--kmax", "4"});
    REQUIRE(r.code == 0);
    const auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 6);
    CHECK(rows[0] == std::vector<std::string>{"k", "p^k", "J", "w", "c", "inside_ball_mass", "classification"});
    CHECK(std::stod(column(rows, 1, "c")) == Approx(6.0 / 7.0).epsilon(1e-15));
    CHECK(column(rows, 1, "classification") == "recurrent");
    CHECK(std::stod(column(rows, 2, "w")) == Approx(3.0 / 28.0).epsilon(1e-15));
    CHECK(std::stod(column(rows, 3, "w")) == Approx(3.0 / 112.0).epsilon(1e-15));
    CHECK(std::stod(column(rows, 2, "J")) == Approx(3.0 / 28.0).epsilon(1e-15));

    const auto transient = run({"kernel", "--alpha", "0.5"});
    REQUIRE(transient.code == 0);
    CHECK(column(parse_csv(transient.out), 1, "classification") == "unknown");
}

TEST_CASE("configuration errors exit with code 2") {
    const auto diverging = run({"kernel", "--family", "log", "--alpha", "1", "--beta", "1"});
    CHECK(diverging.code == 2);
    CHECK(diverging.err.find("normalization diverges") != std::string::npos);
    CHECK(diverging.out.empty());

    CHECK(run({"kernel", "--alpha", "0"}).code == 2);
    CHECK(run({"kernel", "--p", "4"}).code == 2);
    CHECK(run({"kernel", "--bogus", "1"}).code == 2);
    CHECK(run({"kernel", "--family", "cubic"}).code == 2);
    CHECK(run({"kernel", "--format", "xml"}).code == 2);
    CHECK(run({"kernel", "--family", "log", "--alpha", "1"}).code == 2);
    CHECK(run({"kernel", "--family", "synthetic"}).code == 2);
    CHECK(run({"kernel", "--family", "table"}).code == 2);
    CHECK(run({"mc"}).code == 2);
    CHECK(run({"mc", "walk"}).code == 2);
    CHECK(run({}).code == 2);
    CHECK(run({"heat", "--t", "1", "--t-grid", "0:1:0.5"}).code == 2);
    CHECK(run({"heat", "--k", "1", "--kmin", "0"}).code == 2);
    CHECK(run({"heat", "--kmin", "3", "--kmax", "1"}).code == 2);
    CHECK(run({"heat", "--t", "-1"}).code == 2);
    CHECK(run({"survival", "--t-grid", "1:0:1"}).code == 2);
    CHECK(run({"mc", "survival", "--trials", "0"}).code == 2);
    CHECK(run({"volterra", "--h", "0"}).code == 2);
    CHECK(run({"kernel", "--config", scratch("missing.json").string()}).code == 2);

    const auto path = scratch("unknown.json");
    write_file(path, R"({"family": "linear", "colour": "red"})");
    const auto unknown = run({"kernel", "--config", path.string()});
    CHECK(unknown.code == 2);
    CHECK(unknown.err.find("colour") != std::string::npos);

    write_file(path, R"({"family": "linear", "p": "two"})");
    CHECK(run({"kernel", "--config", path.string()}).code == 2);
    write_file(path, "{not json");
    CHECK(run({"kernel", "--config", path.string()}).code == 2);
}

TEST_CASE("numeric refusal exits with code 3") {
    const auto path = scratch("bump.json");
    write_file(path, R"({"family": "table", "t": 1,
        "table": {"kmin": 0, "values": [0.5, 0.1, 0.4, 0.01], "tail": [{"coefficient": 0.64, "exponent": -2}]}})");
    const auto heat = run({"heat", "--config", path.string()});
    CHECK(heat.code == 3);
    CHECK(heat.out.empty());
    CHECK(run({"solve", "--config", path.string()}).code == 3);

    // The symbol itself is still reported, with the monotonicity witness.
    const auto sym = run({"symbol", "--config", path.string(), "--format", "json"});
    REQUIRE(sym.code == 0);
    const auto doc = nlohmann::json::parse(sym.out);
    CHECK(doc["metadata"]["monotone"] == false);
    CHECK(doc["metadata"]["witness_m"] == -1);
}

TEST_CASE("survival table") {
    const auto r = run({"survival", "--family", "linear", "--p", "2", "--n", "1", "--alpha", "2", "--t", "0"});
    REQUIRE(r.code == 0);
    const auto rows = parse_csv(r.out);
    CHECK(rows[0] == std::vector<std::string>{"t", "S", "stated_lower", "corrected_lower", "provable_lower", "upper"});
    CHECK(column(rows, 1, "S") == "1");

    const auto grid = run({"survival", "--family", "synthetic", "--F", "1", "--s", "1", "--t-grid", "0.25:10:0.25"});
    REQUIRE(grid.code == 0);
    const auto g = parse_csv(grid.out);
    REQUIRE(g.size() == 41);
    const auto J = LandscapeKernel::synthetic_power_symbol(2, 1, 1.0, 1.0);
    for (std::size_t i = 1; i < g.size(); ++i) {
        const double t = std::stod(column(g, i, "t"));
        CHECK(t == Approx(0.25 * static_cast<double>(i)).epsilon(1e-15));
        CHECK(std::stod(column(g, i, "S")) == survival_series(J, t));
        CHECK(std::stod(column(g, i, "upper")) == survival_bounds(J, t).upper);
    }

    // No bound constants for a table kernel: the bound columns stay empty.
    const auto path = scratch("flat.json");
    write_file(path, R"({"family": "table", "table": {"kmin": 0, "values": [0.5, 0.25], "tail": [{"coefficient": 1, "exponent": -2}]}})");
    const auto table = run({"survival", "--config", path.string(), "--t", "1"});
    REQUIRE(table.code == 0);
    const auto t = parse_csv(table.out);
    CHECK(column(t, 1, "upper").empty());
    CHECK(!column(t, 1, "S").empty());
}

TEST_CASE("heat and solve tables") {
    const auto heat = run({"heat", "--t", "1", "--family", "synthetic", "--F", "1", "--s", "1", "--k", "1"});
    REQUIRE(heat.code == 0);
    const auto rows = parse_csv(heat.out);
    REQUIRE(rows.size() == 2);
    const double d = std::stod(column(rows, 1, "density"));
    CHECK(d == Approx(0.18016).epsilon(3e-5));
    CHECK(d == heat_kernel_density(LandscapeKernel::synthetic_power_symbol(2, 1, 1.0, 1.0), 1.0, 1));

    const auto grid = run({"heat", "--t-grid", "0.5:1:0.5", "--kmin", "-2", "--kmax", "2"});
    REQUIRE(grid.code == 0);
    CHECK(parse_csv(grid.out).size() == 11);

    const auto solve = run({"solve", "--t", "2", "--kmin", "-3", "--kmax", "3"});
    REQUIRE(solve.code == 0);
    const auto s = parse_csv(solve.out);
    const auto J = LandscapeKernel::regularized_linear(2, 1, 2.0);
    // With u0 the unit-ball indicator, u is flat on the unit ball at the survival value.
    for (std::size_t i = 1; i <= 4; ++i) {
        CHECK(std::stod(column(s, i, "u")) == Approx(survival_series(J, 2.0)).epsilon(1e-12));
    }
    CHECK(column(s, 1, "provenance") == "series_formula");

    const auto wide = run({"solve", "--t", "1", "--radius", "2", "--kmin", "0", "--kmax", "4"});
    REQUIRE(wide.code == 0);
    const auto u0 = RadialFunction::ball_indicator(2, 1, 2);
    const auto oracle = solve_by_convolution(J, 1.0, u0, -10, 10);
    const auto w = parse_csv(wide.out);
    for (std::size_t i = 1; i < w.size(); ++i) {
        const int k = std::stoi(column(w, i, "k"));
        CHECK(std::stod(column(w, i, "u")) == Approx(oracle.u.at(k)).epsilon(1e-10));
    }
}

TEST_CASE("volterra and mc tables") {
    const auto v = run({"volterra", "--h", "0.05", "--tmax", "2"});
    REQUIRE(v.code == 0);
    const auto rows = parse_csv(v.out);
    CHECK(rows[0] == std::vector<std::string>{"t", "g", "f", "cdf"});
    CHECK(rows.size() == 42);
    CHECK(std::stod(column(rows, 41, "t")) == Approx(2.0));

    const auto mc = run({"mc", "survival", "--t", "1", "--trials", "20000", "--seed", "42"});
    REQUIRE(mc.code == 0);
    const auto m = parse_csv(mc.out);
    CHECK(m[0] == std::vector<std::string>{"t", "estimate", "stderr", "series", "trials", "seed"});
    CHECK(column(m, 1, "seed") == "42");
    const double est = std::stod(column(m, 1, "estimate"));
    const double se = std::stod(column(m, 1, "stderr"));
    CHECK(std::abs(est - std::stod(column(m, 1, "series"))) <= 3.0 * se);

    const auto jumps = run({"mc", "jumps", "--trials", "20000"});
    REQUIRE(jumps.code == 0);
    const auto j = parse_csv(jumps.out);
    CHECK(std::stod(column(j, 2, "expected")) == Approx(3.0 / 28.0).epsilon(1e-15));

    const auto passage = run({"mc", "passage", "--trials", "2000", "--t-grid", "10:50:10"});
    REQUIRE(passage.code == 0);
    const auto pa = parse_csv(passage.out);
    REQUIRE(pa.size() == 6);
    for (std::size_t i = 2; i < pa.size(); ++i) {
        CHECK(std::stod(column(pa, i, "return_fraction")) >= std::stod(column(pa, i - 1, "return_fraction")));
    }
    CHECK(run({"mc", "passage", "--t", "100", "--horizon", "50"}).code == 2);

    const auto path = scratch("ball.json");
    write_file(path, R"({"family": "table", "table": {"kmin": 0, "values": [1.0]}})");
    const auto none = run({"mc", "passage", "--config", path.string(), "--trials", "100", "--t", "10"});
    REQUIRE(none.code == 0);
    CHECK(column(parse_csv(none.out), 1, "return_fraction").empty());
}

TEST_CASE("flags override the config file") {
    const auto path = scratch("override.json");
    write_file(path, R"({"command": "survival", "family": "linear", "alpha": 3, "t_grid": "0:1:0.5", "format": "json"})");
    const auto fromfile = run({"--config", path.string()});
    REQUIRE(fromfile.code == 0);
    const auto a = nlohmann::json::parse(fromfile.out);
    CHECK(a["metadata"]["kernel"]["alpha"] == 3.0);
    CHECK(a["columns"]["t"].size() == 3);

    const auto flagged = run({"survival", "--config", path.string(), "--alpha", "2", "--t", "1"});
    REQUIRE(flagged.code == 0);
    const auto b = nlohmann::json::parse(flagged.out);
    CHECK(b["metadata"]["kernel"]["alpha"] == 2.0);
    CHECK(b["columns"]["t"] == nlohmann::json::array({1.0}));
    CHECK(b["columns"]["S"][0].get<double>() ==
          survival_series(LandscapeKernel::regularized_linear(2, 1, 2.0), 1.0));
}

TEST_CASE("json mirrors the csv columns") {
    const std::vector<std::string> args{"heat", "--t-grid", "0.5:1:0.5", "--kmin", "-1", "--kmax", "1"};
    auto json_args = args;
    json_args.insert(json_args.end(), {"--format", "json"});
    const auto csv = parse_csv(run(args).out);
    const auto doc = nlohmann::ordered_json::parse(run(json_args).out);
    CHECK(doc["metadata"]["version"].is_string());
    CHECK(doc["metadata"]["seed"] == 42);
    CHECK(doc["metadata"]["kernel"]["family"] == "linear");
    CHECK(!doc["metadata"].contains("workers"));
    std::size_t i = 0;
    for (const auto& [name, values] : doc["columns"].items()) {
        CHECK(name == csv[0][i]);
        REQUIRE(values.size() == csv.size() - 1);
        for (std::size_t r = 0; r < values.size(); ++r) {
            // 17 significant digits round-trip every double exactly.
            CHECK(values[r].get<double>() == std::stod(csv[r + 1][i]));
        }
        ++i;
    }
}

TEST_CASE("output file and repeatability") {
    const auto path = scratch("out.csv");
    std::filesystem::remove(path);
    const std::vector<std::string> args{"mc", "survival", "--t-grid", "0.5:2:0.5", "--trials", "5000", "--seed", "9"};
    auto to_file = args;
    to_file.insert(to_file.end(), {"--out", path.string()});
    const auto r = run(to_file);
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    std::ifstream f(path);
    const std::string content((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    CHECK(content == run(args).out);
    for (const auto& entry : std::filesystem::directory_iterator(path.parent_path())) {
        CHECK(entry.path().filename().string().find(".tmp.") == std::string::npos);
    }

    auto four = args;
    four.insert(four.end(), {"--workers", "4"});
    auto one = args;
    one.insert(one.end(), {"--workers", "1"});
    CHECK(run(four).out == run(one).out);
    auto other_seed = args;
    other_seed[other_seed.size() - 1] = "10";
    CHECK(run(other_seed).out != run(args).out);

    CHECK(run({"kernel", "--out", "/nonexistent-dir/x.csv"}).code == 2);
}

TEST_CASE("time grids") {
    CHECK(parse_t_grid("0:1:0.25") == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
    CHECK(parse_t_grid("1:1:1") == std::vector<double>{1.0});
    CHECK(parse_t_grid("0:0.3:0.1").size() == 4);
    CHECK_THROWS_AS(parse_t_grid("0:1"), ConfigError);
    CHECK_THROWS_AS(parse_t_grid("0:1:0"), ConfigError);
    CHECK_THROWS_AS(parse_t_grid("a:1:1"), ConfigError);
    CHECK_THROWS_AS(parse_t_grid("0:1:1:1"), ConfigError);
    CHECK_THROWS_AS(parse_t_grid("0:1x:1"), ConfigError);
}

TEST_CASE("help") {
    const auto r = run({"--help"});
    CHECK(r.code == 0);
    CHECK(r.out.find("--family") != std::string::npos);
}
