#include "cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <CLI11.hpp>

#include "padland/errors.hpp"
#include "padland/evolution.hpp"
#include "padland/kernels.hpp"
#include "padland/montecarlo.hpp"
#include "padland/survival.hpp"

#ifndef PADLAND_VERSION
#define PADLAND_VERSION "0.0.0"
#endif

namespace padland::cli {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

// Thrown around errors raised while building the kernel, which are always
// configuration problems (including a diverging normalization).
struct KernelBuildError {
    std::string message;
};

LandscapeKernel build_kernel(const RunConfig& c) {
    try {
        return make_kernel(c.kernel);
    } catch (const Error& e) {
        throw KernelBuildError{e.what()};
    }
}

ordered_json kernel_record(const KernelSpec& k) {
    ordered_json r;
    r["family"] = k.family;
    r["p"] = k.p;
    r["n"] = k.n;
    if (k.family == "linear") {
        r["alpha"] = k.alpha.value_or(2.0);
    } else if (k.family == "log") {
        r["alpha"] = *k.alpha;
        r["beta"] = *k.beta;
    } else if (k.family == "synthetic") {
        r["F"] = k.F;
        r["s"] = k.s;
    } else if (k.table) {
        r["kmin"] = k.table->kmin;
        r["values"] = k.table->values;
    }
    return r;
}

Table make_table_for(const RunConfig& c, std::vector<std::string> columns) {
    Table t;
    t.columns = std::move(columns);
    t.metadata["command"] = c.command;
    if (!c.mode.empty()) {
        t.metadata["mode"] = c.mode;
    }
    t.metadata["kernel"] = kernel_record(c.kernel);
    t.metadata["seed"] = c.seed;
    t.metadata["version"] = PADLAND_VERSION;
    return t;
}

std::vector<double> times_or(const RunConfig& c, std::vector<double> fallback) {
    return c.t_grid.empty() ? fallback : c.t_grid;
}

double radius(int p, int k) { return std::pow(static_cast<double>(p), k); }

Cell integer(long long v) { return Cell(static_cast<std::int64_t>(v)); }

} // namespace

Table cmd_kernel(const RunConfig& c) {
    const auto J = build_kernel(c);
    if (!J.has_density()) {
        throw ConfigError("the synthetic family has no jump density");
    }
    const int kmin = c.kmin.value_or(0);
    const int kmax = c.kmax.value_or(10);
    const auto w = jump_radius_weights(J);
    const auto cls = to_string(classify_recurrence(J));
    Table t = make_table_for(c, {"k", "p^k", "J", "w", "c", "inside_ball_mass", "classification"});
    t.metadata["c"] = J.c();
    t.metadata["inside_ball_mass"] = w.inside_ball_mass;
    t.metadata["classification"] = cls;
    for (int k = kmin; k <= kmax; ++k) {
        // w is the probability that one jump has radius index k (0 for the unit ball).
        Cell weight;
        if (k == 0) {
            weight = w.inside_ball_mass;
        } else if (k > 0) {
            const auto j = static_cast<std::size_t>(k);
            weight = j <= w.weights.size() ? w.weights[j - 1] : J.mass_outside(k - 1) - J.mass_outside(k);
        }
        t.add_row({integer(k), radius(J.prime(), k), J.density(k), weight, J.c(), w.inside_ball_mass, cls});
    }
    return t;
}

Table cmd_symbol(const RunConfig& c) {
    const auto J = build_kernel(c);
    const int kmin = c.kmin.value_or(-20);
    const int kmax = c.kmax.value_or(20);
    const auto mono = check_symbol_monotone(J, std::min(kmin, -40), std::max(kmax, 40));
    Table t = make_table_for(c, {"m", "p^m", "psi"});
    t.metadata["monotone"] = mono.passed;
    if (mono.witness_m) {
        t.metadata["witness_m"] = *mono.witness_m;
    }
    for (int m = kmin; m <= kmax; ++m) {
        t.add_row({integer(m), radius(J.prime(), m), J.symbol(m)});
    }
    return t;
}

Table cmd_heat(const RunConfig& c) {
    const auto J = build_kernel(c);
    const int kmin = c.kmin.value_or(-20);
    const int kmax = c.kmax.value_or(20);
    Table t = make_table_for(c, {"t", "k", "p^k", "density", "mass_outside", "atom"});
    for (double time : times_or(c, {1.0})) {
        // The representation needs two samples for its tail fit.
        const auto Z = heat_kernel(J, time, kmin, std::max(kmax, kmin + 1));
        for (int k = kmin; k <= kmax; ++k) {
            t.add_row({time, integer(k), radius(J.prime(), k), Z.density.at(k), heat_kernel_mass_outside(J, time, k),
                       Z.atom_mass});
        }
    }
    return t;
}

Table cmd_solve(const RunConfig& c) {
    const auto J = build_kernel(c);
    const int kmin = c.kmin.value_or(-10);
    const int kmax = c.kmax.value_or(10);
    const RadialFunction u0 = c.initial ? make_table(*c.initial, J.prime(), J.dimension())
                                        : RadialFunction::ball_indicator(J.prime(), J.dimension(), c.radius);
    Table t = make_table_for(c, {"t", "k", "p^k", "u", "provenance"});
    if (!c.initial) {
        t.metadata["radius"] = c.radius;
    }
    for (double time : times_or(c, {1.0})) {
        const auto sol = solve_radial(J, time, u0, std::nullopt, std::max(kmax, 30));
        const std::string prov = sol.provenance == Provenance::series_formula ? "series_formula" : "convolution";
        for (int k = kmin; k <= kmax; ++k) {
            t.add_row({time, integer(k), radius(J.prime(), k), sol.u.at(k), prov});
        }
    }
    return t;
}

Table cmd_survival(const RunConfig& c) {
    const auto J = build_kernel(c);
    Table t = make_table_for(c, {"t", "S", "stated_lower", "corrected_lower", "provable_lower", "upper"});
    bool bounds = true;
    try {
        survival_bound_constants(J);
    } catch (const PreconditionError& e) {
        bounds = false;
        t.metadata["bounds"] = e.what();
    }
    for (double time : times_or(c, {0.25, 0.5, 1.0, 2.0, 5.0, 10.0})) {
        const double S = survival_series(J, time);
        if (bounds) {
            const auto b = survival_bounds(J, time);
            t.add_row({time, S, b.stated_lower, b.corrected_lower, b.provable_lower, b.upper});
        } else {
            t.add_row({time, S, {}, {}, {}, {}});
        }
    }
    return t;
}

Table cmd_volterra(const RunConfig& c) {
    const auto J = build_kernel(c);
    const auto fp = first_passage_density(J, c.h, c.tmax);
    Table t = make_table_for(c, {"t", "g", "f", "cdf"});
    t.metadata["h"] = c.h;
    t.metadata["tmax"] = c.tmax;
    for (std::size_t i = 0; i < fp.f.size(); ++i) {
        t.add_row({static_cast<double>(i) * c.h, fp.g[i], fp.f[i], fp.cdf[i]});
    }
    return t;
}

Table cmd_mc(const RunConfig& c) {
    const auto J = build_kernel(c);
    if (!J.has_density()) {
        throw ConfigError("simulation needs a kernel with a jump density");
    }
    SimConfig sim{J, c.trials, 1.0, c.seed, c.workers, c.thinning};
    const auto trials = static_cast<std::int64_t>(c.trials);
    const auto seed = static_cast<std::int64_t>(c.seed);
    const double N = static_cast<double>(c.trials);

    if (c.mode == "survival") {
        Table t = make_table_for(c, {"t", "estimate", "stderr", "series", "trials", "seed"});
        t.metadata["thinning"] = c.thinning;
        for (double time : times_or(c, {0.5, 1.0, 2.0})) {
            if (!(time >= 0.0)) {
                throw DomainError("survival time must be nonnegative");
            }
            sim.horizon = time > 0.0 ? time : 1.0;
            const auto e = simulate_survival(sim, time);
            t.add_row({time, e.estimate, e.standard_error, survival_series(J, time), trials, seed});
        }
        return t;
    }
    if (c.mode == "passage") {
        const auto ladder = times_or(c, {1.0, 10.0, 100.0, 1000.0});
        sim.horizon = c.horizon.value_or(ladder.back());
        const auto fp = simulate_first_passage(sim, ladder);
        Table t = make_table_for(c, {"horizon", "return_fraction", "stderr", "exited", "trials", "seed"});
        t.metadata["thinning"] = c.thinning;
        t.metadata["horizon"] = sim.horizon;
        for (std::size_t i = 0; i < ladder.size(); ++i) {
            Cell q;
            Cell se;
            if (!fp.return_fraction.empty()) {
                const double v = fp.return_fraction[i];
                q = v;
                se = std::sqrt(v * (1.0 - v) / N);
            }
            t.add_row({ladder[i], q, se, static_cast<std::int64_t>(fp.exited), trials, seed});
        }
        return t;
    }
    if (c.mode == "jumps") {
        const auto h = simulate_jump_radii(J, c.trials, c.seed, c.workers);
        const auto w = jump_radius_weights(J);
        Table t = make_table_for(c, {"radius", "count", "frequency", "expected", "stderr", "trials", "seed"});
        for (std::size_t r = 0; r < h.counts.size(); ++r) {
            const auto j = static_cast<int>(r);
            const double expected = r == 0 ? w.inside_ball_mass
                                    : r <= w.weights.size() ? w.weights[r - 1]
                                                            : J.mass_outside(j - 1) - J.mass_outside(j);
            t.add_row({integer(j), static_cast<std::int64_t>(h.counts[r]), static_cast<double>(h.counts[r]) / N,
                       expected, std::sqrt(expected * (1.0 - expected) / N), trials, seed});
        }
        return t;
    }
    throw ConfigError("mc mode must be survival, passage or jumps");
}

Table run_command(const RunConfig& c) {
    static const std::map<std::string, Table (*)(const RunConfig&)> commands = {
        {"kernel", cmd_kernel}, {"symbol", cmd_symbol},     {"heat", cmd_heat}, {"solve", cmd_solve},
        {"survival", cmd_survival}, {"volterra", cmd_volterra}, {"mc", cmd_mc}};
    const auto it = commands.find(c.command);
    if (it == commands.end()) {
        throw ConfigError(c.command.empty() ? "no command given" : "unknown command '" + c.command + "'");
    }
    return it->second(c);
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Radial analytics and simulation for landscape random walks on Q_p^n"};
    app.require_subcommand(0, 1);
    // --h is the Volterra step, so help keeps only its long form.
    app.set_help_flag("--help", "Print this help message and exit");

    json flags = json::object();
    std::vector<std::function<void()>> collect;
    auto add = [&]<class T>(const std::string& flag, const std::string& key, T& value, const std::string& help) {
        auto* opt = app.add_option(flag, value, help);
        collect.push_back([&flags, opt, key, &value] {
            if (opt->count() > 0) {
                flags[key] = value;
            }
        });
        return opt;
    };

    std::string family;
    int p = 0;
    int n = 0;
    double alpha = 0;
    double beta = 0;
    double F = 0;
    double s = 0;
    double t = 0;
    std::string t_grid;
    int k = 0;
    int kmin = 0;
    int kmax = 0;
    double h = 0;
    double tmax = 0;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    unsigned workers = 0;
    double horizon = 0;
    int radius_flag = 0;
    std::string format;
    std::string out_path;
    std::string config_path;

    add("--family", "family", family, "linear, log, synthetic or table")
        ->check(CLI::IsMember({"linear", "log", "synthetic", "table"}));
    add("--p", "p", p, "prime");
    add("--n", "n", n, "dimension");
    add("--alpha", "alpha", alpha, "kernel exponent alpha");
    add("--beta", "beta", beta, "log kernel exponent beta");
    add("--F", "F", F, "synthetic symbol constant");
    add("--s", "s", s, "synthetic symbol exponent");
    auto* t_opt = add("--t", "t", t, "single time");
    add("--t-grid", "t_grid", t_grid, "time grid a:b:step")->excludes(t_opt);
    auto* k_opt = add("--k", "k", k, "single radius index");
    add("--kmin", "kmin", kmin, "window start")->excludes(k_opt);
    add("--kmax", "kmax", kmax, "window end")->excludes(k_opt);
    add("--h", "h", h, "Volterra step");
    add("--tmax", "tmax", tmax, "Volterra horizon");
    add("--trials", "trials", trials, "Monte Carlo trials or draws");
    add("--seed", "seed", seed, "Monte Carlo seed");
    add("--workers", "workers", workers, "worker threads (0: hardware concurrency)");
    add("--horizon", "horizon", horizon, "simulated horizon for mc passage");
    add("--radius", "radius", radius_flag, "solve: initial data is the ball of radius p^radius");
    add("--format", "format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    add("--out", "out", out_path, "output file (default: standard output)");
    bool no_thinning = false;
    app.add_flag("--no-thinning", no_thinning, "simulate jumps inside the unit ball explicitly");
    app.add_option("--config", config_path, "JSON configuration file; flags override it");

    for (const char* name : {"kernel", "symbol", "heat", "solve", "survival", "volterra"}) {
        app.add_subcommand(name)->fallthrough();
    }
    std::string mode;
    auto* mc = app.add_subcommand("mc", "Monte Carlo: survival, passage or jumps")->fallthrough();
    mc->add_option("mode", mode, "survival, passage or jumps")->check(CLI::IsMember({"survival", "passage", "jumps"}));

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return exit_config;
    }

    RunConfig config;
    try {
        for (auto& f : collect) {
            f();
        }
        if (no_thinning) {
            flags["thinning"] = false;
        }
        if (!app.get_subcommands().empty()) {
            flags["command"] = app.get_subcommands().front()->get_name();
        }
        if (!mode.empty()) {
            flags["mode"] = mode;
        }
        const json file = config_path.empty() ? json::object() : load_config_file(config_path);
        config = config_from_json(merge_config(file, flags));
        if (config.command == "mc" && config.mode.empty()) {
            throw ConfigError("mc needs a mode: survival, passage or jumps");
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_config;
    }

    try {
        const Table table = run_command(config);
        const std::string text = config.format == "json" ? to_json(table) : to_csv(table);
        if (config.out) {
            write_atomically(*config.out, text);
        } else {
            out << text;
        }
    } catch (const KernelBuildError& e) {
        err << "error: " << e.message << '\n';
        return exit_config;
    } catch (const RefusalError& e) {
        err << "refused: " << e.what() << '\n';
        return exit_refusal;
    } catch (const DivergenceError& e) {
        err << "refused: " << e.what() << '\n';
        return exit_refusal;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_config;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return exit_failure;
    }
    return exit_ok;
}

} // namespace padland::cli
