#include "padland/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <thread>

#include "padland/errors.hpp"

namespace padland {

namespace {

// Runs body(i) for i in [0, count) on a static partition of the index range.
// Results are written by index, so the output never depends on the worker count.
template <class Body>
void parallel_for(std::uint64_t count, unsigned workers, Body&& body) {
    if (workers == 0) {
        workers = std::max(1u, std::thread::hardware_concurrency());
    }
    workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, std::max<std::uint64_t>(count, 1)));
    if (workers == 1) {
        for (std::uint64_t i = 0; i < count; ++i) {
            body(i);
        }
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        const std::uint64_t lo = count * w / workers;
        const std::uint64_t hi = count * (w + 1) / workers;
        pool.emplace_back([&, w, lo, hi] {
            try {
                for (std::uint64_t i = lo; i < hi; ++i) {
                    body(i);
                }
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    for (auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

void check_config(const SimConfig& config) {
    if (config.trials < 1) {
        throw ConfigError("simulation needs at least one trial");
    }
    if (!(config.horizon > 0.0) || !std::isfinite(config.horizon)) {
        throw ConfigError("simulation horizon must be positive and finite");
    }
}

} // namespace

JumpSampler::JumpSampler(const LandscapeKernel& J) : kernel_(J), weights_(jump_radius_weights(J)) {}

int JumpSampler::bracket(double v) const {
    const auto& T = weights_.outside_mass;
    // T is nonincreasing; find the first j >= 1 with T_j < v.
    const auto it = std::upper_bound(T.begin() + 1, T.end(), v, std::greater<>());
    if (it != T.end()) {
        return static_cast<int>(it - T.begin());
    }
    // Below the tabulated range: keep walking with the exact tail masses.
    for (int j = static_cast<int>(T.size());; ++j) {
        if (kernel_.mass_outside(j) < v) {
            return j;
        }
    }
}

int JumpSampler::sample_radius(Stream& rng) const {
    const double u = rng.uniform_open_closed();
    return u > weights_.outside_mass.front() ? 0 : bracket(u);
}

int JumpSampler::sample_outside_radius(Stream& rng) const {
    return bracket(rng.uniform_open_closed() * weights_.outside_mass.front());
}

PAdicCoset JumpSampler::sample_jump(Stream& rng) const {
    const int r = sample_radius(rng);
    const int p = kernel_.prime();
    const int n = kernel_.dimension();
    return r == 0 ? PAdicCoset(p, n) : sample_sphere_coset(p, n, r, rng);
}

PAdicCoset sample_jump(const JumpSampler& sampler, Stream& rng) { return sampler.sample_jump(rng); }

TrialResult simulate_trial(const JumpSampler& sampler, double horizon, bool thinning, std::uint64_t seed,
                           std::uint64_t trial) {
    Stream rng(seed, trial);
    TrialResult r;
    const double rate = thinning ? sampler.outside_mass() : 1.0;
    if (!(rate > 0.0)) {
        return r;
    }
    const int p = sampler.kernel().prime();
    const int n = sampler.kernel().dimension();
    PAdicCoset x(p, n);
    double time = 0.0;
    for (;;) {
        time += rng.exponential(rate);
        if (time > horizon) {
            break;
        }
        const PAdicCoset y = thinning ? sample_sphere_coset(p, n, sampler.sample_outside_radius(rng), rng)
                                      : sampler.sample_jump(rng);
        if (y.is_zero()) {
            continue;
        }
        x = coset_add(x, y);
        if (!r.exited) {
            r.exited = true;
            r.exit_time = time;
        } else if (!r.returned && x.is_zero()) {
            r.returned = true;
            r.tau = time;
        }
    }
    r.in_ball_at_horizon = x.is_zero();
    return r;
}

SurvivalEstimate simulate_survival(const SimConfig& config, double t) {
    check_config(config);
    if (!(t >= 0.0)) {
        throw DomainError("survival time must be nonnegative");
    }
    const JumpSampler sampler(config.kernel);
    std::vector<char> inside(config.trials, 1);
    if (t > 0.0) {
        parallel_for(config.trials, config.workers, [&](std::uint64_t i) {
            inside[i] = simulate_trial(sampler, t, config.thinning, config.seed, i).in_ball_at_horizon ? 1 : 0;
        });
    }
    const auto hits = static_cast<double>(std::count(inside.begin(), inside.end(), 1));
    const double N = static_cast<double>(config.trials);
    const double q = hits / N;
    return {q, std::sqrt(q * (1.0 - q) / N), config.trials};
}

FirstPassageResult simulate_first_passage(const SimConfig& config, const std::vector<double>& horizons) {
    check_config(config);
    for (std::size_t i = 0; i < horizons.size(); ++i) {
        if (!(horizons[i] > 0.0) || horizons[i] > config.horizon || (i > 0 && horizons[i] <= horizons[i - 1])) {
            throw ConfigError("horizon ladder must be increasing and within the simulated horizon");
        }
    }
    const JumpSampler sampler(config.kernel);
    FirstPassageResult out;
    out.trials.resize(config.trials);
    parallel_for(config.trials, config.workers, [&](std::uint64_t i) {
        out.trials[i] = simulate_trial(sampler, config.horizon, config.thinning, config.seed, i);
    });
    for (const auto& r : out.trials) {
        out.exited += r.exited ? 1 : 0;
        if (r.tau) {
            out.tau.push_back(*r.tau);
        }
    }
    out.horizons = horizons;
    if (out.exited > 0) {
        for (double H : horizons) {
            const auto k = std::count_if(out.tau.begin(), out.tau.end(), [H](double tau) { return tau <= H; });
            out.return_fraction.push_back(static_cast<double>(k) / static_cast<double>(config.trials));
        }
    }
    return out;
}

double cdf_distance(std::vector<double> tau, std::uint64_t trials, const std::function<double(double)>& cdf,
                    double T) {
    std::sort(tau.begin(), tau.end());
    const double N = static_cast<double>(trials);
    double d = std::abs(cdf(0.0));
    std::size_t below = 0;
    for (double x : tau) {
        if (x > T) {
            break;
        }
        const double F = cdf(x);
        d = std::max({d, std::abs(static_cast<double>(below) / N - F), std::abs(static_cast<double>(below + 1) / N - F)});
        ++below;
    }
    return std::max(d, std::abs(static_cast<double>(below) / N - cdf(T)));
}

RadiusHistogram simulate_jump_radii(const LandscapeKernel& J, std::uint64_t draws, std::uint64_t seed,
                                    unsigned workers) {
    const JumpSampler sampler(J);
    std::vector<int> radius(draws, 0);
    parallel_for(draws, workers, [&](std::uint64_t i) {
        Stream rng(seed, i);
        // The radius is read back from the sampled coset, which also exercises the
        // sphere sampler.
        radius[i] = sampler.sample_jump(rng).norm().exponent;
    });
    RadiusHistogram h{draws, {}, 0};
    for (int r : radius) {
        if (static_cast<std::size_t>(r) >= h.counts.size()) {
            h.counts.resize(static_cast<std::size_t>(r) + 1, 0);
        }
        ++h.counts[static_cast<std::size_t>(r)];
        h.zero_cosets += r == 0 ? 1 : 0;
    }
    return h;
}

std::vector<PerJumpReport> per_jump_return_probability_check(const LandscapeKernel& J, const std::vector<int>& js,
                                                             std::uint64_t draws, std::uint64_t seed,
                                                             unsigned workers) {
    if (draws < 1) {
        throw ConfigError("per-jump check needs at least one draw");
    }
    const JumpSampler sampler(J);
    std::vector<PerJumpReport> out;
    for (int j : js) {
        if (j < 1 || j > (1 << 20)) {
            throw ConfigError("per-jump check needs a sphere index j >= 1");
        }
        std::vector<char> hit(draws, 0);
        parallel_for(draws, workers, [&](std::uint64_t i) {
            Stream rng(seed, (static_cast<std::uint64_t>(j) << 40) | i);
            const auto x = sample_sphere_coset(J.prime(), J.dimension(), j, rng);
            hit[i] = coset_add(x, sampler.sample_jump(rng)).is_zero() ? 1 : 0;
        });
        const double N = static_cast<double>(draws);
        const double q = static_cast<double>(std::count(hit.begin(), hit.end(), 1)) / N;
        const double expected = J.density(j);
        const double se = std::sqrt(expected * (1.0 - expected) / N);
        out.push_back({j, draws, q, expected, se, std::abs(q - expected) <= 3.0 * se});
    }
    return out;
}

} // namespace padland
