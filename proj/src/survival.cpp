#include "padland/survival.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "padland/errors.hpp"
#include "padland/evolution.hpp"

namespace padland {

namespace {

int series_length(int p, int n) { return static_cast<int>(std::ceil(17.0 * std::log(10.0) / (n * std::log(p)))) + 1; }

// Sum_{k>=0} x^k / (s (s+1) ... (s+k)); gamma(s, x) = x^s e^{-x} times this.
double gamma_series(double s, double x) {
    double term = 1.0 / s;
    double sum = term;
    for (int k = 1; k < 100000; ++k) {
        term *= x / (s + k);
        sum += term;
        if (term < sum * 1e-17) {
            return sum;
        }
    }
    throw DivergenceError("incomplete gamma series did not converge");
}

// Upper incomplete gamma by the modified Lentz continued fraction, valid for x >= s + 1.
double upper_gamma_fraction(double s, double x) {
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - s;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 100000; ++i) {
        const double an = -i * (i - s);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) {
            d = tiny;
        }
        c = b + an / c;
        if (std::abs(c) < tiny) {
            c = tiny;
        }
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) {
            return std::exp(-x + s * std::log(x)) * h;
        }
    }
    throw DivergenceError("incomplete gamma continued fraction did not converge");
}

// gamma(a, x) / x^a, finite at x = 0 where it equals 1/a.
double gamma_ratio(double a, double x) {
    if (x < a + 1.0) {
        return std::exp(-x) * gamma_series(a, x);
    }
    return lower_incomplete_gamma(a, x) / std::pow(x, a);
}

} // namespace

double survival_series(const LandscapeKernel& J, double t) {
    if (!(t >= 0.0)) {
        throw DomainError("survival needs t >= 0");
    }
    const int p = J.prime();
    const int n = J.dimension();
    const double pn = std::pow(p, -n);
    const int terms = series_length(p, n);
    double sum = 0.0;
    double w = 1.0;
    for (int j = 0; j < terms; ++j, w *= pn) {
        sum += w * std::exp(-t * J.symbol(-j));
    }
    sum += std::exp(-t * J.symbol(-terms)) * w / (1.0 - pn);
    return (1.0 - pn) * sum;
}

double lower_incomplete_gamma(double s, double x) {
    if (!(s > 0.0) || !(x >= 0.0)) {
        throw DomainError("lower incomplete gamma needs s > 0 and x >= 0");
    }
    if (x == 0.0) {
        return 0.0;
    }
    if (x < s + 1.0) {
        return std::exp(s * std::log(x) - x) * gamma_series(s, x);
    }
    return std::tgamma(s) - upper_gamma_fraction(s, x);
}

BoundConstants survival_bound_constants(const LandscapeKernel& J) {
    const double p = J.prime();
    const double n = J.dimension();
    const double scale = (std::pow(p, n) - 1.0) / std::log(p);
    const auto b = symbol_bounds(J);
    switch (J.family()) {
    case KernelFamily::regularized_linear:
        if (J.alpha() + 1.0 - 2.0 * n < 0.0) {
            throw PreconditionError("survival bounds need alpha + 1 - 2n >= 0");
        }
        break;
    case KernelFamily::regularized_log:
        if (J.beta() - J.alpha() - 2.0 * n < 0.0) {
            throw PreconditionError("survival bounds need beta - alpha - 2n >= 0");
        }
        break;
    case KernelFamily::synthetic_power_symbol:
        if (J.s() < n) {
            throw PreconditionError("survival bounds need s >= n");
        }
        break;
    case KernelFamily::custom_table:
        throw PreconditionError("no survival bounds for table kernels");
    }
    // The lower bound on psi gives the upper bound on S and vice versa.
    return {b.lower_constant, b.lower_exponent, scale / b.lower_exponent,
            b.upper_constant, b.upper_exponent, scale / b.upper_exponent};
}

SurvivalBounds survival_bounds(const LandscapeKernel& J, double t) {
    if (!(t >= 0.0)) {
        throw DomainError("survival bounds need t >= 0");
    }
    const auto k = survival_bound_constants(J);
    const double p = J.prime();
    const double n = J.dimension();
    SurvivalBounds out{};
    out.upper = k.upper_prefactor * gamma_ratio(n / k.upper_exponent, t * k.upper_X);
    out.stated_lower = k.lower_prefactor * gamma_ratio(n / k.lower_exponent, t * k.lower_X);
    out.corrected_lower = out.stated_lower / std::pow(p, n);
    out.provable_lower = (1.0 - std::pow(p, -n)) / (k.lower_exponent * std::log(p)) *
                         gamma_ratio(n / k.lower_exponent, t * k.lower_X * std::pow(p, k.lower_exponent));
    return out;
}

SurvivalReport survival_report(const LandscapeKernel& J, const std::vector<double>& t_grid) {
    SurvivalReport r{survival_bound_constants(J), {}, {}, {}, {}, {}, {}};
    for (double t : t_grid) {
        const auto b = survival_bounds(J, t);
        r.t.push_back(t);
        r.S.push_back(survival_series(J, t));
        r.stated_lower.push_back(b.stated_lower);
        r.corrected_lower.push_back(b.corrected_lower);
        r.provable_lower.push_back(b.provable_lower);
        r.upper.push_back(b.upper);
    }
    return r;
}

double g_density(const LandscapeKernel& J, double t) {
    if (!J.has_density()) {
        throw PreconditionError("g needs a kernel density");
    }
    if (!(t >= 0.0)) {
        throw DomainError("g needs t >= 0");
    }
    if (t == 0.0) {
        return 0.0;
    }
    const int p = J.prime();
    const int n = J.dimension();
    // Beyond radius p^K the remainder is at most p^{-nK} times the jump mass there,
    // since the density of Z_t on the sphere of radius p^k is at most p^{-nk}.
    int K = 2;
    while (std::pow(p, -static_cast<double>(n) * K) * J.mass_outside(K) > 1e-18) {
        ++K;
    }
    const auto Z = heat_kernel(J, t, 1, K);
    double g = 0.0;
    for (int k = 1; k <= K; ++k) {
        g += std::pow(p, static_cast<double>(n) * k) * (1.0 - std::pow(p, -n)) * J.density(k) * Z.density.at(k);
    }
    return g;
}

std::vector<double> volterra_solve(const std::vector<double>& g, double h) {
    if (!(h > 0.0)) {
        throw DomainError("Volterra step must be positive");
    }
    std::vector<double> f(g.size(), 0.0);
    if (g.empty()) {
        return f;
    }
    f[0] = g[0];
    const double denom = 1.0 + 0.5 * h * g[0];
    for (std::size_t i = 1; i < g.size(); ++i) {
        double conv = 0.5 * g[i] * f[0];
        for (std::size_t l = 1; l < i; ++l) {
            conv += g[i - l] * f[l];
        }
        f[i] = (g[i] - h * conv) / denom;
    }
    return f;
}

FirstPassageDensity first_passage_density(const LandscapeKernel& J, double h, double T) {
    if (!(h > 0.0) || !(T > 0.0)) {
        throw DomainError("first passage grid needs h > 0 and T > 0");
    }
    const auto N = static_cast<std::size_t>(std::llround(T / h));
    FirstPassageDensity out{h, {}, {}, {}};
    for (std::size_t i = 0; i <= N; ++i) {
        out.g.push_back(g_density(J, static_cast<double>(i) * h));
    }
    out.f = volterra_solve(out.g, h);
    out.cdf.assign(out.f.size(), 0.0);
    for (std::size_t i = 1; i < out.f.size(); ++i) {
        out.cdf[i] = out.cdf[i - 1] + 0.5 * h * (out.f[i - 1] + out.f[i]);
    }
    return out;
}

ReturnProbability return_probability(const LandscapeKernel& J, double T_max) {
    if (!(T_max > 0.0)) {
        throw DomainError("return probability needs T_max > 0");
    }
    ReturnProbability out{0.0, {}};
    auto g = [&](double t) { return g_density(J, t); };
    double G = 0.0;
    double a = 0.0;
    double b = std::min(1.0, T_max);
    while (true) {
        G += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(g, a, b, 15, 1e-12);
        out.trace.emplace_back(b, 1.0 - 1.0 / (1.0 + G));
        if (b >= T_max) {
            break;
        }
        a = b;
        b = std::min(2.0 * b, T_max);
    }
    out.estimate = out.trace.back().second;
    return out;
}

} // namespace padland
