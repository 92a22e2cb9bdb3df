#pragma once

#include <vector>

#include "padland/kernels.hpp"

namespace padland {

/// S(t) = (1 - p^{-n}) sum_{j>=0} p^{-nj} e^{-t psi(p^{-j})}, the probability of
/// sitting in the unit ball at time t after starting there.
double survival_series(const LandscapeKernel& J, double t);

/// gamma(s, x) = int_0^x z^{s-1} e^{-z} dz. Throws DomainError unless s > 0 and x >= 0.
double lower_incomplete_gamma(double s, double x);

/// Constants of the incomplete-gamma bounds on S(t). Each bound reads
///   prefactor / (t X)^{n/s} * gamma(n/s, t X)
/// with the power-law exponent s of the symbol bound it comes from.
struct BoundConstants {
    double upper_X;        ///< A_1 (linear) or E_3 (log)
    double upper_exponent; ///< alpha + 1 - n or beta - n
    double upper_prefactor;///< A_3 or A_4
    double lower_X;        ///< C_2 or E_2
    double lower_exponent; ///< alpha + 1 - n or beta - n - alpha
    double lower_prefactor;///< B_3 or B_4
};

/// Throws PreconditionError when the recurrence hypothesis fails
/// (alpha + 1 - 2n < 0, beta - alpha - 2n < 0, synthetic s < n) or for tables.
BoundConstants survival_bound_constants(const LandscapeKernel& J);

struct SurvivalBounds {
    double stated_lower;
    /// stated_lower / p^n.
    double corrected_lower;
    /// Lower bound that keeps the first integration cell:
    /// (1 - p^{-n}) p^{-n} gamma(n/s, t X p^s) / (s ln p (t X)^{n/s}).
    double provable_lower;
    double upper;
};

SurvivalBounds survival_bounds(const LandscapeKernel& J, double t);

struct SurvivalReport {
    BoundConstants constants;
    std::vector<double> t;
    std::vector<double> S;
    std::vector<double> stated_lower;
    std::vector<double> corrected_lower;
    std::vector<double> provable_lower;
    std::vector<double> upper;
};

SurvivalReport survival_report(const LandscapeKernel& J, const std::vector<double>& t_grid);

/// Rate at time t of jumps from outside the unit ball back into it, for a
/// walk started in the unit ball: sum_{k>=1} p^{nk}(1 - p^{-n}) J(p^k) u(p^k, t)
/// with u = Z_t * Omega.
double g_density(const LandscapeKernel& J, double t);

/// Solves g = f + g * f on the grid t_i = i h by trapezoidal forward
/// substitution.
std::vector<double> volterra_solve(const std::vector<double>& g, double h);

struct FirstPassageDensity {
    double h;
    std::vector<double> g;
    std::vector<double> f;
    /// Trapezoidal cumulative integral of f.
    std::vector<double> cdf;
};

/// g on [0, T] with step h and the first-passage density f solving the
/// renewal equation.
FirstPassageDensity first_passage_density(const LandscapeKernel& J, double h, double T);

struct ReturnProbability {
    double estimate;
    /// (T, 1 - 1/(1 + int_0^T g)) on a doubling ladder ending at T_max.
    std::vector<std::pair<double, double>> trace;
};

ReturnProbability return_probability(const LandscapeKernel& J, double T_max);

} // namespace padland
