#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "padland/kernels.hpp"
#include "padland/padic.hpp"
#include "padland/rng.hpp"

namespace padland {

/// Draws jump increments of the walk with generator J * f - f on Q_p^n / Z_p^n.
class JumpSampler {
public:
    explicit JumpSampler(const LandscapeKernel& J);

    const LandscapeKernel& kernel() const noexcept { return kernel_; }
    double inside_ball_mass() const noexcept { return weights_.inside_ball_mass; }
    /// Mass of jumps that leave the unit ball.
    double outside_mass() const noexcept { return weights_.outside_mass.front(); }

    /// Radius index of one jump: 0 for the unit ball, j >= 1 for the sphere of radius p^j.
    int sample_radius(Stream& rng) const;
    /// Radius index conditioned on leaving the unit ball.
    int sample_outside_radius(Stream& rng) const;
    /// Increment as a coset; jumps inside the unit ball give the zero coset.
    PAdicCoset sample_jump(Stream& rng) const;

private:
    // Smallest j >= 1 with v > mass beyond p^j.
    int bracket(double v) const;

    LandscapeKernel kernel_;
    JumpWeights weights_;
};

PAdicCoset sample_jump(const JumpSampler& sampler, Stream& rng);

struct SimConfig {
    LandscapeKernel kernel;
    std::uint64_t trials{100000};
    double horizon{1.0};
    std::uint64_t seed{42};
    /// 0 selects the hardware concurrency.
    unsigned workers{0};
    /// Skip jumps inside the unit ball by running the clock at the rate of the
    /// remaining jumps; the law of the coset path is unchanged.
    bool thinning{true};
};

struct TrialResult {
    bool exited{false};
    std::optional<double> exit_time;
    bool returned{false};
    std::optional<double> tau;
    bool in_ball_at_horizon{true};
};

struct SurvivalEstimate {
    double estimate;
    double standard_error;
    std::uint64_t trials;
};

/// Fraction of trials whose coset is zero at time t.
SurvivalEstimate simulate_survival(const SimConfig& config, double t);

/// Trial record up to config.horizon; trial i always uses Stream(seed, i).
TrialResult simulate_trial(const JumpSampler& sampler, double horizon, bool thinning, std::uint64_t seed,
                           std::uint64_t trial);

struct FirstPassageResult {
    std::vector<TrialResult> trials;
    std::vector<double> horizons;
    /// Fraction of all trials with tau <= horizon; empty when no trial ever left the unit ball.
    std::vector<double> return_fraction;
    /// Observed first passage times, in trial order.
    std::vector<double> tau;
    std::uint64_t exited{0};
};

/// Runs every trial to config.horizon and reports the returned fraction on the
/// given ladder of horizons (each at most config.horizon).
FirstPassageResult simulate_first_passage(const SimConfig& config, const std::vector<double>& horizons);

/// Kolmogorov distance on [0, T] between the empirical law of tau (trials
/// without a return count as tau > T) and a reference CDF.
double cdf_distance(std::vector<double> tau, std::uint64_t trials, const std::function<double(double)>& cdf,
                    double T);

struct RadiusHistogram {
    std::uint64_t draws;
    /// counts[0] for the unit ball, counts[j] for the sphere of radius p^j.
    std::vector<std::uint64_t> counts;
    std::uint64_t zero_cosets;
};

RadiusHistogram simulate_jump_radii(const LandscapeKernel& J, std::uint64_t draws, std::uint64_t seed,
                                    unsigned workers = 0);

struct PerJumpReport {
    int j;
    std::uint64_t draws;
    double frequency;
    double expected;
    double standard_error;
    bool within_three_sigma;
};

/// From a random coset of norm p^j, one jump lands on the zero coset with
/// probability J(p^j).
std::vector<PerJumpReport> per_jump_return_probability_check(const LandscapeKernel& J, const std::vector<int>& js,
                                                             std::uint64_t draws, std::uint64_t seed,
                                                             unsigned workers = 0);

} // namespace padland
