#pragma once

#include <optional>

#include "padland/kernels.hpp"
#include "padland/radial.hpp"

namespace padland {

/// Z_t split into a point mass at the origin and a radial density.
struct HeatKernelRepr {
    double t;
    double atom_mass;
    /// Sphere values on the window; the head is the innermost sampled value and
    /// the tail a power law fitted to the last two samples.
    RadialFunction density;
};

/// Z_t(p^k) = p^{-nk}(1 - p^{-n}) sum_{j>=0} p^{-nj}[e^{-t psi(p^{-j-k})} - e^{-t psi(p^{1-k})}].
/// Throws RefusalError when psi is not increasing, DomainError for t < 0.
double heat_kernel_density(const LandscapeKernel& J, double t, int k);

HeatKernelRepr heat_kernel(const LandscapeKernel& J, double t, int kmin = -20, int kmax = 20);

/// Exact mass of Z_t outside the ball of radius p^k,
/// (1 - p^{-n}) sum_{j>=0} p^{-nj} (1 - e^{-t psi(p^{-k-j})}).
double heat_kernel_mass_outside(const LandscapeKernel& J, double t, int k);

/// e^{-t} sum_m t^m/m! J^{*m} by repeated radial convolution, truncated once the
/// remaining Poisson weight is below 1e-15. The density keeps the closed-form
/// head and tail produced by the convolutions.
HeatKernelRepr compound_poisson_oracle(const LandscapeKernel& J, double t);

/// e^{-t psi(p^m)}.
double fourier_of_Z(const LandscapeKernel& J, double t, int m);

/// Z_t * Z_s expanded as e^{-t-s} delta + e^{-t} rho_s + e^{-s} rho_t + rho_t * rho_s.
HeatKernelRepr combine(const HeatKernelRepr& a, const HeatKernelRepr& b);

enum class Provenance { series_formula, convolution };

struct RadialSolution {
    double t;
    RadialFunction u;
    Provenance provenance;
};

/// Solution of u_t = J * u - u with radial data u0 whose transform vanishes
/// beyond radius p^M:
///   u(p^k) = -[k > -M] p^{-nk} e^{-t psi(p^{1-k})} Fu0(p^{1-k})
///            + (1 - p^{-n}) sum_{j>=max(k,-M)} p^{-nj} e^{-t psi(p^{-j})} Fu0(p^{-j}).
/// M is inferred from Fu0 when omitted; a given M is verified (PreconditionError).
RadialSolution solve_radial(const LandscapeKernel& J, double t, const RadialFunction& u0,
                            std::optional<int> M = std::nullopt, int kmax = 30);

/// e^{-t} u0 + rho_t * u0.
RadialSolution solve_by_convolution(const LandscapeKernel& J, double t, const RadialFunction& u0,
                                    int kmin = -20, int kmax = 20);

struct ComparisonReport {
    bool ordered{true};
    /// Smallest u - v seen on the grid and where.
    double min_gap{0.0};
    int min_gap_k{0};
    bool contraction{true};
    double l1_initial{0.0};
    double l1_final{0.0};
};

/// Checks u >= v on [kmin, kmax] and ||u - v||_1 <= ||u0 - v0||_1 for the
/// solutions at time t.
ComparisonReport comparison_check(const LandscapeKernel& J, double t, const RadialFunction& u0,
                                  const RadialFunction& v0, int kmin = -20, int kmax = 20);

} // namespace padland
