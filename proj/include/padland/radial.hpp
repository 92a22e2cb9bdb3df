#pragma once

#include <optional>
#include <vector>

namespace padland {

/// One term c * p^{k e} of a tail expansion.
struct PowerTerm {
    double coefficient;
    double exponent;
};

/// Closed-form behaviour of a radial function beyond its sampled window:
/// f(p^k) = sum_i c_i p^{k e_i}.
///
/// The empty sum is the zero tail, a single term with exponent 0 a constant
/// tail. Convolution keeps this family closed, which is why more than one
/// term is allowed.
class Tail {
public:
    static Tail zero() { return Tail{}; }
    static Tail constant(double c) { return power(c, 0.0); }
    static Tail power(double c, double e);
    static Tail from_terms(std::vector<PowerTerm> terms);

    bool is_zero() const noexcept { return terms_.empty(); }
    const std::vector<PowerTerm>& terms() const noexcept { return terms_; }

    double at(int p, int k) const;
    /// Sum of |c_i| p^{k e_i}; the scale against which the tail is compared.
    double magnitude_at(int p, int k) const;

private:
    std::vector<PowerTerm> terms_;
};

/// A real function of the norm on Q_p^n, sampled on the radii p^k for k in a
/// window [kmin, kmax].
///
/// Below the window the function equals `limit_at_zero` (its value on a small
/// ball around 0); above it the declared tail applies. A nonzero tail must
/// agree with the last sample.
class RadialFunction {
public:
    RadialFunction(int p, int n, int kmin, std::vector<double> values, double limit_at_zero,
                   Tail tail = Tail::zero());

    /// Omega(p^{-r} ||x||_p), the indicator of the ball of radius p^r.
    static RadialFunction ball_indicator(int p, int n, int r = 0);

    int prime() const noexcept { return p_; }
    int dimension() const noexcept { return n_; }
    int kmin() const noexcept { return kmin_; }
    int kmax() const noexcept { return kmin_ + static_cast<int>(values_.size()) - 1; }
    const std::vector<double>& values() const noexcept { return values_; }
    double limit_at_zero() const noexcept { return limit_at_zero_; }
    const Tail& tail() const noexcept { return tail_; }

    /// f(p^k) for any integer k.
    double at(int k) const;
    double operator()(int k) const { return at(k); }

    RadialFunction scaled(double factor) const;

private:
    int p_;
    int n_;
    int kmin_;
    std::vector<double> values_;
    double limit_at_zero_;
    Tail tail_;
};

/// Integral of f over the ball B_k = {||x|| <= p^k}.
double ball_integral(const RadialFunction& f, int k);

/// Integral of f over {||x|| > p^k}. Throws DivergenceError when the tail does
/// not converge.
double outside_integral(const RadialFunction& f, int k);

/// Integral of f over Q_p^n with closed-form head and tail sums.
double integrate_radial(const RadialFunction& f);

/// Integral of |f| over Q_p^n.
double l1_norm(const RadialFunction& f);

/// Radial Fourier transform,
/// (Ff)(p^m) = (1 - p^{-n}) sum_{j <= -m} p^{nj} f(p^j) - p^{-nm} f(p^{1-m}).
///
/// The output is sampled on [-kmax - extension, 1 - kmin]; it vanishes beyond
/// the window and tends to integral(f) near 0. Without an explicit extension the
/// lower end is pushed until the remaining deviation from integral(f) is below
/// double precision.
RadialFunction radial_fourier(const RadialFunction& f, std::optional<int> extension = std::nullopt);

/// Radial convolution f * g evaluated sphere by sphere with the ultrametric
/// addition law. Tails stay in closed form.
RadialFunction radial_convolve(const RadialFunction& f, const RadialFunction& g);

/// a f + b g on the union of both windows.
RadialFunction linear_combination(double a, const RadialFunction& f, double b, const RadialFunction& g);

/// Pointwise product on the union of both windows.
RadialFunction pointwise_product(const RadialFunction& f, const RadialFunction& g);

/// The nonlocal generator A f = J * f - f for a radial density J.
RadialFunction apply_generator(const RadialFunction& kernel_density, const RadialFunction& f);

} // namespace padland
