#include "padland/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "padland/errors.hpp"

namespace padland {

namespace {

// Number of terms after which p^{-nj} < 1e-17.
int series_length(int p, int n) { return static_cast<int>(std::ceil(17.0 * std::log(10.0) / (n * std::log(p)))) + 1; }

void check_time(double t) {
    if (!(t >= 0.0) || !std::isfinite(t)) {
        throw DomainError("time must be finite and nonnegative");
    }
}

void require_monotone(const LandscapeKernel& J, int mlo, int mhi) {
    const auto report = check_symbol_monotone(J, std::min(mlo, -40), std::max(mhi, 40));
    if (!report.passed) {
        throw RefusalError("symbol is not increasing: psi(p^" + std::to_string(*report.witness_m + 1) +
                           ") < psi(p^" + std::to_string(*report.witness_m) + ")");
    }
}

// e^{-t a} - e^{-t b} for a <= b without cancellation.
double exp_gap(double t, double a, double b) { return std::exp(-t * a) * -std::expm1(-t * (b - a)); }

// Power tail through the last two samples, or none when they do not describe
// an integrable power law.
Tail fit_tail(int p, int n, int K, double vK, double vKm1) {
    if (vK == 0.0 || vKm1 == 0.0 || (vK > 0.0) != (vKm1 > 0.0)) {
        return Tail::zero();
    }
    const double e = std::log(vK / vKm1) / std::log(static_cast<double>(p));
    if (!(e + n < 0.0)) {
        return Tail::zero();
    }
    return Tail::power(vK * std::pow(p, -K * e), e);
}

RadialFunction sampled(int p, int n, int kmin, std::vector<double> values, double head) {
    const int K = kmin + static_cast<int>(values.size()) - 1;
    Tail tail = values.size() >= 2 ? fit_tail(p, n, K, values.back(), values[values.size() - 2]) : Tail::zero();
    return RadialFunction(p, n, kmin, std::move(values), head, std::move(tail));
}

double density_unchecked(const LandscapeKernel& J, double t, int k) {
    if (t == 0.0) {
        return 0.0;
    }
    const int p = J.prime();
    const int n = J.dimension();
    const double pn = std::pow(p, -n);
    const int terms = series_length(p, n);
    const double psi_b = J.symbol(1 - k);
    double sum = 0.0;
    double w = 1.0;
    for (int j = 0; j < terms; ++j, w *= pn) {
        sum += w * exp_gap(t, J.symbol(-j - k), psi_b);
    }
    // Beyond the cut psi(p^{-j-k}) is negligible and the bracket is 1 - e^{-t psi_b}.
    sum += -std::expm1(-t * psi_b) * w / (1.0 - pn);
    return std::pow(p, -static_cast<double>(n) * k) * (1.0 - pn) * sum;
}

double atom_mass(const LandscapeKernel& J, double t) { return t == 0.0 ? 1.0 : std::exp(-t * J.symbol_at_infinity()); }

} // namespace

double heat_kernel_density(const LandscapeKernel& J, double t, int k) {
    check_time(t);
    require_monotone(J, -k - series_length(J.prime(), J.dimension()), 1 - k);
    return density_unchecked(J, t, k);
}

HeatKernelRepr heat_kernel(const LandscapeKernel& J, double t, int kmin, int kmax) {
    check_time(t);
    if (kmax <= kmin) {
        throw ConfigError("heat kernel window needs kmin < kmax");
    }
    require_monotone(J, -kmax - series_length(J.prime(), J.dimension()), 1 - kmin);
    std::vector<double> v;
    for (int k = kmin; k <= kmax; ++k) {
        v.push_back(density_unchecked(J, t, k));
    }
    const double head = v.front();
    return {t, atom_mass(J, t), sampled(J.prime(), J.dimension(), kmin, std::move(v), head)};
}

double heat_kernel_mass_outside(const LandscapeKernel& J, double t, int k) {
    check_time(t);
    const int p = J.prime();
    const int n = J.dimension();
    const double pn = std::pow(p, -n);
    const int terms = series_length(p, n);
    double sum = 0.0;
    double w = 1.0;
    for (int j = 0; j < terms; ++j, w *= pn) {
        sum += w * -std::expm1(-t * J.symbol(-k - j));
    }
    sum += -std::expm1(-t * J.symbol(-k - terms)) * w / (1.0 - pn);
    return (1.0 - pn) * sum;
}

HeatKernelRepr compound_poisson_oracle(const LandscapeKernel& J, double t) {
    check_time(t);
    if (!J.has_density()) {
        throw PreconditionError("compound Poisson expansion needs a density");
    }
    const auto base = J.to_radial();
    auto acc = base.scaled(0.0);
    if (t > 0.0) {
        auto power = base;
        double weight = std::exp(-t) * t;
        for (int m = 1;; ++m) {
            acc = linear_combination(1.0, acc, weight, power);
            // Remaining Poisson weight after term m, bounded by a geometric series
            // once the ratio t/(i+1) drops below 1.
            const double next = weight * t / (m + 1);
            const double ratio = t / (m + 2);
            if (ratio < 1.0 && next / (1.0 - ratio) < 1e-15) {
                break;
            }
            if (m > 10000) {
                throw DivergenceError("compound Poisson series did not settle");
            }
            power = radial_convolve(power, base);
            weight = next;
        }
    }
    return {t, std::exp(-t), std::move(acc)};
}

double fourier_of_Z(const LandscapeKernel& J, double t, int m) {
    check_time(t);
    return std::exp(-t * J.symbol(m));
}

HeatKernelRepr combine(const HeatKernelRepr& a, const HeatKernelRepr& b) {
    auto mixed = linear_combination(a.atom_mass, b.density, b.atom_mass, a.density);
    auto joint = radial_convolve(a.density, b.density);
    return {a.t + b.t, a.atom_mass * b.atom_mass, linear_combination(1.0, mixed, 1.0, joint)};
}

RadialSolution solve_radial(const LandscapeKernel& J, double t, const RadialFunction& u0, std::optional<int> M,
                            int kmax) {
    check_time(t);
    const int p = J.prime();
    const int n = J.dimension();
    if (u0.prime() != p || u0.dimension() != n) {
        throw ConfigError("solve_radial: initial data and kernel live on different spaces");
    }
    const auto fu0 = radial_fourier(u0);
    const int lo = fu0.kmin();
    const int hi = fu0.kmax();
    double scale = std::abs(fu0.limit_at_zero());
    for (double v : fu0.values()) {
        scale = std::max(scale, std::abs(v));
    }
    const double tol = 1e-12 * scale;
    if (M) {
        for (int m = *M + 1; m <= hi; ++m) {
            if (std::abs(fu0.at(m)) > tol) {
                throw PreconditionError("transform of the initial data does not vanish beyond radius p^" +
                                        std::to_string(*M) + " (nonzero at p^" + std::to_string(m) + ")");
            }
        }
    } else {
        int inferred = lo - 1;
        for (int m = hi; m >= lo; --m) {
            if (std::abs(fu0.at(m)) > tol) {
                inferred = m;
                break;
            }
        }
        M = inferred;
    }
    const int support = *M;
    const int kout = std::max({kmax, -support + 2, u0.kmax() + 2});
    const int terms = series_length(p, n);
    require_monotone(J, -kout - terms, support);

    const double pn = std::pow(p, -n);
    // Spectrum sample e^{-t psi(p^m)} Fu0(p^m) split into its two factors.
    auto decay = [&](int m) { return t == 0.0 ? 1.0 : std::exp(-t * J.symbol(m)); };
    auto evaluate = [&](int k) {
        const int K = std::max(k, -support);
        double sum = 0.0;
        double w = 1.0;
        if (k <= -support) {
            for (int i = 0; i < terms; ++i, w *= pn) {
                sum += w * decay(-K - i) * fu0.at(-K - i);
            }
            sum += fu0.limit_at_zero() * w / (1.0 - pn);
        } else {
            const double fb = fu0.at(1 - k);
            const double psi_b = t == 0.0 ? 0.0 : J.symbol(1 - k);
            for (int i = 0; i < terms; ++i, w *= pn) {
                const int m = -K - i;
                const double psi_a = t == 0.0 ? 0.0 : J.symbol(m);
                sum += w * (decay(m) * (fu0.at(m) - fb) + fb * exp_gap(t, psi_a, psi_b));
            }
            sum += (fu0.limit_at_zero() - fb + fb * -std::expm1(-t * psi_b)) * w / (1.0 - pn);
        }
        return std::pow(p, -static_cast<double>(n) * K) * (1.0 - pn) * sum;
    };

    std::vector<double> v;
    for (int k = -support + 1; k <= kout; ++k) {
        v.push_back(evaluate(k));
    }
    return {t, sampled(p, n, -support + 1, std::move(v), evaluate(-support)), Provenance::series_formula};
}

RadialSolution solve_by_convolution(const LandscapeKernel& J, double t, const RadialFunction& u0, int kmin,
                                    int kmax) {
    const auto Z = heat_kernel(J, t, kmin, kmax);
    auto u = linear_combination(Z.atom_mass, u0, 1.0, radial_convolve(Z.density, u0));
    return {t, std::move(u), Provenance::convolution};
}

ComparisonReport comparison_check(const LandscapeKernel& J, double t, const RadialFunction& u0,
                                  const RadialFunction& v0, int kmin, int kmax) {
    const auto u = solve_radial(J, t, u0);
    const auto v = solve_radial(J, t, v0);
    ComparisonReport report;
    report.min_gap = u.u.at(kmin) - v.u.at(kmin);
    report.min_gap_k = kmin;
    for (int k = kmin; k <= kmax; ++k) {
        const double a = u.u.at(k);
        const double b = v.u.at(k);
        const double gap = a - b;
        if (gap < report.min_gap) {
            report.min_gap = gap;
            report.min_gap_k = k;
        }
        // Rounding slack relative to the two values being compared.
        if (gap < -1e-12 * (std::abs(a) + std::abs(b))) {
            report.ordered = false;
        }
    }
    report.l1_initial = l1_norm(linear_combination(1.0, u0, -1.0, v0));
    report.l1_final = l1_norm(linear_combination(1.0, u.u, -1.0, v.u));
    report.contraction = report.l1_final <= report.l1_initial * (1.0 + 1e-10);
    return report;
}

} // namespace padland
