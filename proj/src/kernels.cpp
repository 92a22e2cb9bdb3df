#include "padland/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "padland/errors.hpp"
#include "padland/padic.hpp"

namespace padland {

namespace {

constexpr int kLogTableSize = 512;
constexpr long kMaxSeriesTerms = 50'000'000;

void check_space(int p, int n) {
    if (!is_prime(p) || n < 1) {
        throw ConfigError("kernel needs a prime p and n >= 1");
    }
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
}

} // namespace

std::string to_string(KernelFamily family) {
    switch (family) {
    case KernelFamily::regularized_linear:
        return "linear";
    case KernelFamily::regularized_log:
        return "log";
    case KernelFamily::synthetic_power_symbol:
        return "synthetic";
    case KernelFamily::custom_table:
        return "table";
    }
    return "unknown";
}

std::string to_string(Recurrence r) { return r == Recurrence::recurrent ? "recurrent" : "unknown"; }

// Suffix sums of a_j = p^{j(n - beta)} ln^alpha(1 + p^j), j >= 1.
struct LandscapeKernel::LogSeries {
    std::vector<double> suffix; // suffix[j] for 1 <= j <= kLogTableSize; suffix[0] unused
};

double LandscapeKernel::log_term(int j) const {
    const double lp = std::log(static_cast<double>(p_));
    // ln(1 + p^j) without overflowing p^j.
    const double l = j * lp + std::log1p(std::exp(-j * lp));
    return std::exp(j * (n_ - beta_) * lp + alpha_ * std::log(l));
}

double LandscapeKernel::log_suffix(int j) const {
    if (log_ && j <= kLogTableSize) {
        return log_->suffix[static_cast<std::size_t>(j)];
    }
    // Ratios a_{i+1}/a_i decrease toward p^{n-beta} < 1, so once a ratio r is
    // below 1 the remainder after a_i is at most a_{i+1}/(1 - r).
    double sum = 0.0;
    double a = log_term(j);
    for (long i = j; i < j + kMaxSeriesTerms; ++i) {
        sum += a;
        const double next = log_term(static_cast<int>(i + 1));
        const double after = log_term(static_cast<int>(i + 2));
        if (next == 0.0) {
            return sum;
        }
        const double r = after / next;
        if (r < 1.0 && next / (1.0 - r) <= 1e-18 * sum) {
            return sum + next / (1.0 - r);
        }
        a = next;
    }
    throw DivergenceError("log kernel series did not converge");
}

LandscapeKernel LandscapeKernel::regularized_linear(int p, int n, double alpha) {
    check_space(p, n);
    if (!(alpha > 0.0)) {
        throw ConfigError("linear kernel needs alpha > 0");
    }
    if (!(alpha + 1.0 > n)) {
        throw DivergenceError("normalization diverges: linear kernel needs alpha + 1 > n");
    }
    LandscapeKernel J;
    J.family_ = KernelFamily::regularized_linear;
    J.p_ = p;
    J.n_ = n;
    J.alpha_ = alpha;
    const double q = std::pow(p, n - alpha - 1.0);
    J.c_ = 1.0 / (1.0 + (1.0 - std::pow(p, -n)) * q / (1.0 - q));
    J.F_ = J.c_ * (q + (1.0 - std::pow(p, -n)) * q * q / (1.0 - q));
    return J;
}

LandscapeKernel LandscapeKernel::regularized_log(int p, int n, double alpha, double beta) {
    check_space(p, n);
    if (!(alpha > 0.0)) {
        throw ConfigError("log kernel needs alpha > 0");
    }
    if (!(beta > n)) {
        throw DivergenceError("normalization diverges: log kernel needs beta > n");
    }
    LandscapeKernel J;
    J.family_ = KernelFamily::regularized_log;
    J.p_ = p;
    J.n_ = n;
    J.alpha_ = alpha;
    J.beta_ = beta;
    auto series = std::make_shared<LogSeries>();
    series->suffix.assign(kLogTableSize + 2, 0.0);
    series->suffix[kLogTableSize + 1] = J.log_suffix(kLogTableSize + 1);
    for (int j = kLogTableSize; j >= 1; --j) {
        series->suffix[static_cast<std::size_t>(j)] = J.log_term(j) + series->suffix[static_cast<std::size_t>(j + 1)];
    }
    J.log_ = std::move(series);
    const double inside = std::pow(std::log(2.0), alpha);
    J.c_ = 1.0 / (inside + (1.0 - std::pow(p, -n)) * J.log_suffix(1));
    return J;
}

LandscapeKernel LandscapeKernel::synthetic_power_symbol(int p, int n, double F, double s) {
    check_space(p, n);
    if (!(F > 0.0) || !(s > 0.0)) {
        throw ConfigError("synthetic symbol needs F > 0 and s > 0");
    }
    LandscapeKernel J;
    J.family_ = KernelFamily::synthetic_power_symbol;
    J.p_ = p;
    J.n_ = n;
    J.F_ = F;
    J.s_ = s;
    J.c_ = F;
    return J;
}

LandscapeKernel LandscapeKernel::custom_table(const RadialFunction& density) {
    if (density.limit_at_zero() < 0.0 ||
        std::any_of(density.values().begin(), density.values().end(), [](double v) { return v < 0.0; }) ||
        std::any_of(density.tail().terms().begin(), density.tail().terms().end(),
                    [](const PowerTerm& t) { return t.coefficient < 0.0; })) {
        throw ConfigError("kernel table must be nonnegative");
    }
    const double mass = integrate_radial(density);
    if (!(mass > 0.0) || !std::isfinite(mass)) {
        throw ConfigError("kernel table must have positive finite mass");
    }
    LandscapeKernel J;
    J.family_ = KernelFamily::custom_table;
    J.p_ = density.prime();
    J.n_ = density.dimension();
    J.table_ = std::make_shared<const RadialFunction>(density.scaled(1.0 / mass));
    return J;
}

double LandscapeKernel::density(int k) const {
    switch (family_) {
    case KernelFamily::regularized_linear:
        return k <= 0 ? c_ : c_ * std::pow(p_, -k * (alpha_ + 1.0));
    case KernelFamily::regularized_log:
        if (k <= 0) {
            return c_ * std::pow(std::log(2.0), alpha_);
        }
        return c_ * log_term(k) * std::pow(p_, -static_cast<double>(n_) * k);
    case KernelFamily::custom_table:
        return table_->at(k);
    case KernelFamily::synthetic_power_symbol:
        break;
    }
    throw PreconditionError("synthetic symbol has no density");
}

double LandscapeKernel::mass_outside(int k) const {
    const double pn = std::pow(p_, -n_);
    switch (family_) {
    case KernelFamily::regularized_linear: {
        const double e = n_ - alpha_ - 1.0;
        const double q = std::pow(p_, e);
        const double at0 = c_ * (1.0 - pn) * q / (1.0 - q);
        if (k >= 0) {
            return c_ * (1.0 - pn) * std::pow(p_, (k + 1) * e) / (1.0 - q);
        }
        return at0 + c_ * (1.0 - std::pow(p_, static_cast<double>(n_) * k));
    }
    case KernelFamily::regularized_log: {
        const double at0 = c_ * (1.0 - pn) * log_suffix(1);
        if (k >= 0) {
            return c_ * (1.0 - pn) * log_suffix(k + 1);
        }
        return at0 + density(0) * (1.0 - std::pow(p_, static_cast<double>(n_) * k));
    }
    case KernelFamily::custom_table:
        return outside_integral(*table_, k);
    case KernelFamily::synthetic_power_symbol:
        break;
    }
    throw PreconditionError("synthetic symbol has no density");
}

double LandscapeKernel::symbol(int m) const {
    switch (family_) {
    case KernelFamily::synthetic_power_symbol:
        return F_ * std::pow(p_, static_cast<double>(m) * s_);
    case KernelFamily::regularized_linear:
        if (m >= 1) {
            return 1.0;
        }
        return F_ * std::pow(p_, m * (alpha_ + 1.0 - n_));
    case KernelFamily::regularized_log:
        if (m >= 1) {
            return 1.0;
        }
        break;
    case KernelFamily::custom_table:
        break;
    }
    return std::pow(p_, static_cast<double>(n_) * (1 - m)) * density(1 - m) + mass_outside(1 - m);
}

double LandscapeKernel::symbol_at_infinity() const noexcept {
    return has_density() ? 1.0 : std::numeric_limits<double>::infinity();
}

RadialFunction LandscapeKernel::to_radial(int kmin, int kmax) const {
    if (kmax < kmin) {
        throw ConfigError("empty kernel window");
    }
    std::vector<double> v;
    v.reserve(static_cast<std::size_t>(kmax - kmin + 1));
    switch (family_) {
    case KernelFamily::synthetic_power_symbol:
        throw PreconditionError("synthetic symbol has no density");
    case KernelFamily::regularized_linear:
    case KernelFamily::regularized_log: {
        if (kmin > 1 || kmax < 1) {
            throw ConfigError("kernel window must contain k = 1 and start at or below it");
        }
        for (int k = kmin; k <= kmax; ++k) {
            v.push_back(density(k));
        }
        Tail tail = family_ == KernelFamily::regularized_linear ? Tail::power(c_, -(alpha_ + 1.0)) : Tail::zero();
        return RadialFunction(p_, n_, kmin, std::move(v), density(0), std::move(tail));
    }
    case KernelFamily::custom_table:
        if (kmin > table_->kmin() || kmax < table_->kmax()) {
            throw ConfigError("kernel window must cover the table");
        }
        for (int k = kmin; k <= kmax; ++k) {
            v.push_back(table_->at(k));
        }
        return RadialFunction(p_, n_, kmin, std::move(v), table_->limit_at_zero(), table_->tail());
    }
    throw ConfigError("unknown kernel family");
}

RadialFunction LandscapeKernel::to_radial() const {
    switch (family_) {
    case KernelFamily::regularized_linear:
        return to_radial(0, 8);
    case KernelFamily::regularized_log: {
        int K = 1;
        while (mass_outside(K) >= 1e-16) {
            if (++K > 20000) {
                throw DivergenceError("log kernel tail too heavy to tabulate");
            }
        }
        return to_radial(0, K);
    }
    case KernelFamily::custom_table:
        return *table_;
    case KernelFamily::synthetic_power_symbol:
        break;
    }
    throw PreconditionError("synthetic symbol has no density");
}

std::string LandscapeKernel::describe() const {
    const std::string space = "p=" + std::to_string(p_) + ",n=" + std::to_string(n_);
    switch (family_) {
    case KernelFamily::regularized_linear:
        return "linear(" + space + ",alpha=" + fmt(alpha_) + ")";
    case KernelFamily::regularized_log:
        return "log(" + space + ",alpha=" + fmt(alpha_) + ",beta=" + fmt(beta_) + ")";
    case KernelFamily::synthetic_power_symbol:
        return "synthetic(" + space + ",F=" + fmt(F_) + ",s=" + fmt(s_) + ")";
    case KernelFamily::custom_table:
        return "table(" + space + ",kmin=" + std::to_string(table_->kmin()) + ",kmax=" +
               std::to_string(table_->kmax()) + ")";
    }
    return "unknown";
}

double symbol(const LandscapeKernel& J, int m) { return J.symbol(m); }

Symbol tabulate_symbol(const LandscapeKernel& J, int mmin, int mmax) {
    if (mmax < mmin) {
        throw ConfigError("empty symbol window");
    }
    Symbol out{J.prime(), J.dimension(), mmin, {}, J.symbol_at_infinity()};
    for (int m = mmin; m <= mmax; ++m) {
        out.values.push_back(J.symbol(m));
    }
    return out;
}

MonotoneReport check_symbol_monotone(const LandscapeKernel& J, int mmin, int mmax) {
    MonotoneReport report;
    double prev = J.symbol(mmin);
    for (int m = mmin; m < mmax; ++m) {
        const double next = J.symbol(m + 1);
        // Rounding slack only; a genuine decrease is of the size of a density step.
        if (next < prev - 1e-14 * std::abs(prev)) {
            report.passed = false;
            report.witness_m = m;
            report.psi_at_witness = prev;
            report.psi_after_witness = next;
            return report;
        }
        prev = next;
    }
    return report;
}

Recurrence classify_recurrence(const LandscapeKernel& J) {
    const int n = J.dimension();
    switch (J.family()) {
    case KernelFamily::regularized_linear:
        return J.alpha() + 1.0 - 2.0 * n >= 0.0 ? Recurrence::recurrent : Recurrence::unknown;
    case KernelFamily::regularized_log:
        return J.beta() - J.alpha() - 2.0 * n >= 0.0 ? Recurrence::recurrent : Recurrence::unknown;
    default:
        return Recurrence::unknown;
    }
}

JumpWeights jump_radius_weights(const LandscapeKernel& J) {
    if (!J.has_density()) {
        throw PreconditionError("jump weights need a density");
    }
    JumpWeights w;
    // Regularized densities are constant on the unit ball, whose volume is 1.
    w.inside_ball_mass =
        J.family() == KernelFamily::custom_table ? ball_integral(J.to_radial(), 0) : J.density(0);
    w.outside_mass.push_back(J.mass_outside(0));
    for (int j = 1; w.outside_mass.back() >= 1e-17 && j <= 100000; ++j) {
        w.weights.push_back(sphere_volume(J.prime(), J.dimension(), j) * J.density(j));
        w.outside_mass.push_back(J.mass_outside(j));
    }
    return w;
}

SymbolBounds symbol_bounds(const LandscapeKernel& J) {
    const double p = J.prime();
    const double n = J.dimension();
    switch (J.family()) {
    case KernelFamily::regularized_linear: {
        const double e = J.alpha() + 1.0 - n;
        return {J.F(), e, J.F(), e};
    }
    case KernelFamily::regularized_log: {
        const double a = J.alpha();
        const double b = J.beta();
        if (!(b - n - a > 0.0)) {
            throw PreconditionError("log symbol upper bound needs beta - n - alpha > 0");
        }
        const double e3 = J.c() * std::pow(p, n + a - b) / std::pow(2.0 + p, a);
        const double r = std::pow(p, a + n - b);
        const double e2 = J.c() * (r + (1.0 - std::pow(p, -n)) * r * r / (1.0 - r));
        return {e3, b - n, e2, b - n - a};
    }
    case KernelFamily::synthetic_power_symbol:
        return {J.F(), J.s(), J.F(), J.s()};
    case KernelFamily::custom_table:
        break;
    }
    throw PreconditionError("no power bounds for table kernels");
}

RadialFunction apply_generator(const LandscapeKernel& J, const RadialFunction& f) {
    return apply_generator(J.to_radial(), f);
}

} // namespace padland
