#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "padland/kernels.hpp"

namespace padland::cli {

struct TableSpec {
    int kmin{0};
    std::vector<double> values;
    std::optional<double> limit_at_zero;
    std::vector<PowerTerm> tail;
};

struct KernelSpec {
    std::string family{"linear"};
    int p{2};
    int n{1};
    /// Defaults to 2 for the linear family; the log family needs both alpha and beta.
    std::optional<double> alpha;
    std::optional<double> beta;
    double F{1.0};
    double s{1.0};
    std::optional<TableSpec> table;
};

struct RunConfig {
    std::string command;
    /// mc only: survival, passage or jumps.
    std::string mode;
    KernelSpec kernel;
    std::vector<double> t_grid;
    std::optional<int> kmin;
    std::optional<int> kmax;
    double h{0.01};
    double tmax{20.0};
    std::uint64_t trials{100000};
    std::uint64_t seed{42};
    unsigned workers{0};
    std::optional<double> horizon;
    bool thinning{true};
    /// solve: initial data is the indicator of the ball of radius p^radius unless `initial` is given.
    int radius{0};
    std::optional<TableSpec> initial;
    std::string format{"csv"};
    std::optional<std::string> out;
};

/// Parses "a:b:step" into a, a + step, ... up to b.
std::vector<double> parse_t_grid(const std::string& spec);

/// Validates a merged configuration document; unknown keys are a ConfigError.
RunConfig config_from_json(const nlohmann::json& doc);

/// Reads a JSON configuration file.
nlohmann::json load_config_file(const std::string& path);

/// Merges flag values over a file document. Setting one of t / t_grid (or k /
/// kmin / kmax) on the command line replaces the whole group from the file.
nlohmann::json merge_config(nlohmann::json file, const nlohmann::json& flags);

LandscapeKernel make_kernel(const KernelSpec& spec);
RadialFunction make_table(const TableSpec& spec, int p, int n);

} // namespace padland::cli
