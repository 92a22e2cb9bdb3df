#include "cli/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "padland/errors.hpp"

namespace padland::cli {

namespace {

using nlohmann::json;

const std::set<std::string> kKeys = {"command", "mode",   "family", "p",         "n",      "alpha",   "beta",
                                     "F",       "s",      "table",  "t",         "t_grid", "k",       "kmin",
                                     "kmax",    "h",      "tmax",   "trials",    "seed",   "workers", "horizon",
                                     "thinning", "radius", "initial", "format",  "out"};

template <class T>
T get(const json& doc, const char* key) {
    try {
        return doc.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("invalid value for '") + key + "'");
    }
}

double get_number(const json& doc, const char* key) {
    if (!doc.at(key).is_number()) {
        throw ConfigError(std::string("'") + key + "' must be a number");
    }
    return doc.at(key).get<double>();
}

std::int64_t get_integer(const json& doc, const char* key) {
    const auto& v = doc.at(key);
    if (!v.is_number_integer()) {
        throw ConfigError(std::string("'") + key + "' must be an integer");
    }
    return v.get<std::int64_t>();
}

std::uint64_t get_count(const json& doc, const char* key) {
    const auto v = get_integer(doc, key);
    if (v < 0) {
        throw ConfigError(std::string("'") + key + "' must be nonnegative");
    }
    return static_cast<std::uint64_t>(v);
}

TableSpec table_from_json(const json& doc, const char* what) {
    if (!doc.is_object()) {
        throw ConfigError(std::string("'") + what + "' must be an object");
    }
    for (const auto& [key, value] : doc.items()) {
        if (key != "kmin" && key != "values" && key != "limit_at_zero" && key != "tail") {
            throw ConfigError(std::string("unknown key '") + key + "' in '" + what + "'");
        }
    }
    TableSpec t;
    if (!doc.contains("kmin") || !doc.contains("values")) {
        throw ConfigError(std::string("'") + what + "' needs kmin and values");
    }
    t.kmin = static_cast<int>(get_integer(doc, "kmin"));
    t.values = get<std::vector<double>>(doc, "values");
    if (t.values.empty()) {
        throw ConfigError(std::string("'") + what + "' needs at least one value");
    }
    if (doc.contains("limit_at_zero")) {
        t.limit_at_zero = get_number(doc, "limit_at_zero");
    }
    if (doc.contains("tail")) {
        for (const auto& term : doc.at("tail")) {
            if (!term.is_object() || !term.contains("coefficient") || !term.contains("exponent")) {
                throw ConfigError("tail terms need coefficient and exponent");
            }
            t.tail.push_back({get_number(term, "coefficient"), get_number(term, "exponent")});
        }
    }
    return t;
}

} // namespace

std::vector<double> parse_t_grid(const std::string& spec) {
    const auto c1 = spec.find(':');
    const auto c2 = c1 == std::string::npos ? std::string::npos : spec.find(':', c1 + 1);
    if (c2 == std::string::npos || spec.find(':', c2 + 1) != std::string::npos) {
        throw ConfigError("t-grid must look like a:b:step");
    }
    double a;
    double b;
    double step;
    try {
        std::size_t used = 0;
        a = std::stod(spec.substr(0, c1), &used);
        if (used != c1) {
            throw std::invalid_argument("a");
        }
        const auto mid = spec.substr(c1 + 1, c2 - c1 - 1);
        b = std::stod(mid, &used);
        if (used != mid.size()) {
            throw std::invalid_argument("b");
        }
        const auto tail = spec.substr(c2 + 1);
        step = std::stod(tail, &used);
        if (used != tail.size()) {
            throw std::invalid_argument("step");
        }
    } catch (const std::logic_error&) {
        throw ConfigError("t-grid must look like a:b:step");
    }
    if (!(step > 0.0) || !(b >= a) || !std::isfinite(b)) {
        throw ConfigError("t-grid needs step > 0 and b >= a");
    }
    const double count = std::floor((b - a) / step + 1e-9);
    if (count > 1e6) {
        throw ConfigError("t-grid has too many points");
    }
    std::vector<double> grid;
    for (int i = 0; i <= static_cast<int>(count); ++i) {
        grid.push_back(a + i * step);
    }
    return grid;
}

RunConfig config_from_json(const json& doc) {
    if (!doc.is_object()) {
        throw ConfigError("configuration must be a JSON object");
    }
    for (const auto& [key, value] : doc.items()) {
        if (!kKeys.count(key)) {
            throw ConfigError("unknown configuration key '" + key + "'");
        }
    }
    RunConfig c;
    if (doc.contains("command")) {
        c.command = get<std::string>(doc, "command");
    }
    if (doc.contains("mode")) {
        c.mode = get<std::string>(doc, "mode");
    }

    auto& k = c.kernel;
    if (doc.contains("family")) {
        k.family = get<std::string>(doc, "family");
    }
    if (k.family != "linear" && k.family != "log" && k.family != "synthetic" && k.family != "table") {
        throw ConfigError("family must be linear, log, synthetic or table");
    }
    if (doc.contains("p")) {
        k.p = static_cast<int>(get_integer(doc, "p"));
    }
    if (doc.contains("n")) {
        k.n = static_cast<int>(get_integer(doc, "n"));
    }
    if (doc.contains("alpha")) {
        k.alpha = get_number(doc, "alpha");
    }
    if (doc.contains("beta")) {
        k.beta = get_number(doc, "beta");
    }
    if (doc.contains("F")) {
        k.F = get_number(doc, "F");
    }
    if (doc.contains("s")) {
        k.s = get_number(doc, "s");
    }
    if (doc.contains("table")) {
        k.table = table_from_json(doc.at("table"), "table");
    }

    if (doc.contains("t") && doc.contains("t_grid")) {
        throw ConfigError("give either t or t_grid, not both");
    }
    if (doc.contains("t")) {
        const auto& t = doc.at("t");
        c.t_grid = t.is_array() ? get<std::vector<double>>(doc, "t") : std::vector<double>{get_number(doc, "t")};
    } else if (doc.contains("t_grid")) {
        c.t_grid = parse_t_grid(get<std::string>(doc, "t_grid"));
    }
    for (double t : c.t_grid) {
        if (!std::isfinite(t)) {
            throw ConfigError("times must be finite");
        }
    }

    if (doc.contains("k") && (doc.contains("kmin") || doc.contains("kmax"))) {
        throw ConfigError("give either k or kmin/kmax, not both");
    }
    if (doc.contains("k")) {
        c.kmin = c.kmax = static_cast<int>(get_integer(doc, "k"));
    }
    if (doc.contains("kmin")) {
        c.kmin = static_cast<int>(get_integer(doc, "kmin"));
    }
    if (doc.contains("kmax")) {
        c.kmax = static_cast<int>(get_integer(doc, "kmax"));
    }
    if (c.kmin && c.kmax && *c.kmin > *c.kmax) {
        throw ConfigError("kmin must not exceed kmax");
    }

    if (doc.contains("h")) {
        c.h = get_number(doc, "h");
    }
    if (doc.contains("tmax")) {
        c.tmax = get_number(doc, "tmax");
    }
    if (!(c.h > 0.0) || !(c.tmax > 0.0) || !std::isfinite(c.tmax)) {
        throw ConfigError("h and tmax must be positive");
    }
    if (doc.contains("trials")) {
        c.trials = get_count(doc, "trials");
    }
    if (doc.contains("seed")) {
        c.seed = get_count(doc, "seed");
    }
    if (doc.contains("workers")) {
        c.workers = static_cast<unsigned>(get_count(doc, "workers"));
    }
    if (doc.contains("horizon")) {
        c.horizon = get_number(doc, "horizon");
    }
    if (doc.contains("thinning")) {
        c.thinning = get<bool>(doc, "thinning");
    }
    if (doc.contains("radius")) {
        c.radius = static_cast<int>(get_integer(doc, "radius"));
    }
    if (doc.contains("initial")) {
        c.initial = table_from_json(doc.at("initial"), "initial");
    }
    if (doc.contains("format")) {
        c.format = get<std::string>(doc, "format");
    }
    if (c.format != "csv" && c.format != "json") {
        throw ConfigError("format must be csv or json");
    }
    if (doc.contains("out")) {
        c.out = get<std::string>(doc, "out");
    }
    return c;
}

json load_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) {
        throw ConfigError("cannot read config file " + path);
    }
    try {
        return json::parse(f);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
    }
}

json merge_config(json file, const json& flags) {
    if (!file.is_object()) {
        throw ConfigError("configuration must be a JSON object");
    }
    if (flags.contains("t") || flags.contains("t_grid")) {
        file.erase("t");
        file.erase("t_grid");
    }
    if (flags.contains("k") || flags.contains("kmin") || flags.contains("kmax")) {
        file.erase("k");
        if (flags.contains("k")) {
            file.erase("kmin");
            file.erase("kmax");
        }
    }
    for (const auto& [key, value] : flags.items()) {
        file[key] = value;
    }
    return file;
}

RadialFunction make_table(const TableSpec& spec, int p, int n) {
    return RadialFunction(p, n, spec.kmin, spec.values, spec.limit_at_zero.value_or(spec.values.front()),
                          spec.tail.empty() ? Tail::zero() : Tail::from_terms(spec.tail));
}

LandscapeKernel make_kernel(const KernelSpec& spec) {
    if (spec.family == "linear") {
        return LandscapeKernel::regularized_linear(spec.p, spec.n, spec.alpha.value_or(2.0));
    }
    if (spec.family == "log") {
        if (!spec.alpha || !spec.beta) {
            throw ConfigError("log kernel needs alpha and beta");
        }
        return LandscapeKernel::regularized_log(spec.p, spec.n, *spec.alpha, *spec.beta);
    }
    if (spec.family == "synthetic") {
        return LandscapeKernel::synthetic_power_symbol(spec.p, spec.n, spec.F, spec.s);
    }
    if (!spec.table) {
        throw ConfigError("table kernel needs a 'table' entry in the config file");
    }
    return LandscapeKernel::custom_table(make_table(*spec.table, spec.p, spec.n));
}

} // namespace padland::cli
