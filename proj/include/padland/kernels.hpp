#pragma once

#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "padland/radial.hpp"

namespace padland {

enum class KernelFamily { regularized_linear, regularized_log, synthetic_power_symbol, custom_table };

std::string to_string(KernelFamily family);

/// A radial jump density J on Q_p^n with unit mass, or a bare power symbol.
///
/// The regularized families hold J constant on the unit ball and follow
///   linear: c p^{-k(alpha+1)},                  k >= 1
///   log:    c ln^alpha(1 + p^k) p^{-k beta},    k >= 1
/// on the sphere of radius p^k. The synthetic family carries no density and
/// only defines psi(p^m) = F p^{ms}.
class LandscapeKernel {
public:
    /// Throws DivergenceError unless alpha + 1 > n.
    static LandscapeKernel regularized_linear(int p, int n, double alpha);
    /// Throws DivergenceError unless beta > n.
    static LandscapeKernel regularized_log(int p, int n, double alpha, double beta);
    static LandscapeKernel synthetic_power_symbol(int p, int n, double F, double s);
    /// Rescales a nonnegative table to unit mass.
    static LandscapeKernel custom_table(const RadialFunction& density);

    KernelFamily family() const noexcept { return family_; }
    int prime() const noexcept { return p_; }
    int dimension() const noexcept { return n_; }
    double alpha() const noexcept { return alpha_; }
    double beta() const noexcept { return beta_; }
    /// Normalization constant (1 for tables, F for the synthetic symbol).
    double c() const noexcept { return c_; }
    double F() const noexcept { return F_; }
    double s() const noexcept { return s_; }
    bool has_density() const noexcept { return family_ != KernelFamily::synthetic_power_symbol; }

    /// J(p^k). Throws PreconditionError for the synthetic family.
    double density(int k) const;
    /// Mass of J outside the ball of radius p^k.
    double mass_outside(int k) const;
    /// psi(p^m) = 1 - (FJ)(p^m).
    double symbol(int m) const;
    /// Limit of psi at infinity: 1 for densities, +inf for the synthetic symbol.
    double symbol_at_infinity() const noexcept;

    /// J sampled on [kmin, kmax]. Closed-form tails are kept; the log family
    /// gets a zero tail, so kmax should leave negligible mass outside.
    RadialFunction to_radial(int kmin, int kmax) const;
    /// J on a window wide enough that the discarded mass is below 1e-16.
    RadialFunction to_radial() const;

    /// Short record used in output metadata, e.g. "linear(p=2,n=1,alpha=2)".
    std::string describe() const;

private:
    struct LogSeries;

    LandscapeKernel() = default;

    double log_term(int j) const;
    double log_suffix(int j) const;

    KernelFamily family_{KernelFamily::regularized_linear};
    int p_{2};
    int n_{1};
    double alpha_{0.0};
    double beta_{0.0};
    double c_{1.0};
    double F_{0.0};
    double s_{0.0};
    std::shared_ptr<const LogSeries> log_;
    std::shared_ptr<const RadialFunction> table_;
};

/// psi(p^m) for the kernel J.
double symbol(const LandscapeKernel& J, int m);

/// psi tabulated on [mmin, mmax] with psi(0) = 0 and its limit at infinity.
struct Symbol {
    int p;
    int n;
    int mmin;
    std::vector<double> values;
    double at_infinity;

    double at_zero() const noexcept { return 0.0; }
    int mmax() const noexcept { return mmin + static_cast<int>(values.size()) - 1; }
    double at(int m) const { return values.at(static_cast<std::size_t>(m - mmin)); }
};

Symbol tabulate_symbol(const LandscapeKernel& J, int mmin, int mmax);

struct MonotoneReport {
    bool passed{true};
    /// First m on the window with psi(p^{m+1}) < psi(p^m).
    std::optional<int> witness_m;
    double psi_at_witness{0.0};
    double psi_after_witness{0.0};
};

/// Checks psi(p^m) <= psi(p^{m+1}) for consecutive m in [mmin, mmax].
MonotoneReport check_symbol_monotone(const LandscapeKernel& J, int mmin = -40, int mmax = 40);

enum class Recurrence { recurrent, unknown };

std::string to_string(Recurrence r);

/// Recurrent when alpha + 1 - 2n >= 0 (linear) or beta - alpha - 2n >= 0 (log);
/// unknown otherwise and for every other family.
Recurrence classify_recurrence(const LandscapeKernel& J);

/// Law of the radius of one jump.
struct JumpWeights {
    double inside_ball_mass{1.0};
    /// weights[j - 1] = J(p^j) p^{nj} (1 - p^{-n}) for j >= 1.
    std::vector<double> weights;
    /// outside_mass[j] = mass beyond radius p^j, j >= 0, tabulated until it
    /// drops below 1e-17.
    std::vector<double> outside_mass;
};

JumpWeights jump_radius_weights(const LandscapeKernel& J);

/// Constants of the two-sided power bounds lower * p^{m s_lo} <= psi(p^m) <= upper * p^{m s_up}, m <= 0.
struct SymbolBounds {
    double lower_constant;
    double lower_exponent;
    double upper_constant;
    double upper_exponent;
};

/// Linear: A_1 = C_2 = F with exponent alpha + 1 - n. Log: E_3 with exponent
/// beta - n below and E_2 with exponent beta - n - alpha above. Synthetic: F, s.
SymbolBounds symbol_bounds(const LandscapeKernel& J);

/// A f = J * f - f.
RadialFunction apply_generator(const LandscapeKernel& J, const RadialFunction& f);

} // namespace padland
