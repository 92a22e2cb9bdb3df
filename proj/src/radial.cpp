#include "padland/radial.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "padland/errors.hpp"
#include "padland/padic.hpp"

namespace padland {

namespace {

constexpr double kExponentMergeTol = 1e-12;
constexpr double kTailAgreementTol = 1e-9;

double ppow(int p, double e) { return std::pow(static_cast<double>(p), e); }

double vol(int p, int n, int k) { return ppow(p, static_cast<double>(n) * k) * (1.0 - ppow(p, -n)); }

// sum_{j >= from} p^{j s} for s < 0.
double geometric_from(int p, double s, int from) { return ppow(p, from * s) / (1.0 - ppow(p, s)); }

// sum_{j = from}^{to} p^{j s}; empty when to < from.
double geometric_range(int p, double s, int from, int to) {
    if (to < from) {
        return 0.0;
    }
    if (std::abs(s) < kExponentMergeTol) {
        return static_cast<double>(to - from + 1);
    }
    return (ppow(p, from * s) - ppow(p, (to + 1) * s)) / (1.0 - ppow(p, s));
}

void require_same_space(const RadialFunction& f, const RadialFunction& g, const char* op) {
    if (f.prime() != g.prime() || f.dimension() != g.dimension()) {
        throw ConfigError(std::string(op) + ": radial functions live on different spaces");
    }
}

// Integral of the tail over the spheres k > from (from >= kmax of the owner).
double tail_outside(const Tail& tail, int p, int n, int from) {
    double total = 0.0;
    for (const auto& t : tail.terms()) {
        const double s = t.exponent + n;
        if (s >= 0.0) {
            throw DivergenceError("radial integral diverges in the tail (||x|| -> infinity)");
        }
        total += t.coefficient * (1.0 - ppow(p, -n)) * geometric_from(p, s, from + 1);
    }
    return total;
}

class TermAccumulator {
public:
    void add(double coefficient, double exponent) {
        if (coefficient == 0.0) {
            return;
        }
        auto it = terms_.lower_bound(exponent - kExponentMergeTol);
        if (it != terms_.end() && std::abs(it->first - exponent) <= kExponentMergeTol) {
            it->second += coefficient;
        } else {
            terms_.emplace(exponent, coefficient);
        }
    }

    // Drops terms that are negligible against the largest one from radius p^from on.
    Tail finish(int p, int from) const {
        double largest = 0.0;
        for (const auto& [e, c] : terms_) {
            largest = std::max(largest, std::abs(c) * ppow(p, from * e));
        }
        std::vector<PowerTerm> kept;
        for (const auto& [e, c] : terms_) {
            if (std::abs(c) * ppow(p, from * e) > 1e-30 * largest) {
                kept.push_back({c, e});
            }
        }
        return Tail::from_terms(std::move(kept));
    }

private:
    std::map<double, double> terms_;
};

} // namespace

Tail Tail::power(double c, double e) {
    Tail t;
    if (c != 0.0) {
        t.terms_.push_back({c, e});
    }
    return t;
}

Tail Tail::from_terms(std::vector<PowerTerm> terms) {
    Tail t;
    for (const auto& term : terms) {
        if (term.coefficient != 0.0) {
            t.terms_.push_back(term);
        }
    }
    return t;
}

double Tail::at(int p, int k) const {
    double v = 0.0;
    for (const auto& t : terms_) {
        v += t.coefficient * ppow(p, k * t.exponent);
    }
    return v;
}

double Tail::magnitude_at(int p, int k) const {
    double v = 0.0;
    for (const auto& t : terms_) {
        v += std::abs(t.coefficient) * ppow(p, k * t.exponent);
    }
    return v;
}

RadialFunction::RadialFunction(int p, int n, int kmin, std::vector<double> values, double limit_at_zero, Tail tail)
    : p_(p), n_(n), kmin_(kmin), values_(std::move(values)), limit_at_zero_(limit_at_zero), tail_(std::move(tail)) {
    if (!is_prime(p) || n < 1) {
        throw ConfigError("radial function needs a prime p and n >= 1");
    }
    if (values_.empty()) {
        throw ConfigError("radial function window is empty");
    }
    if (!tail_.is_zero()) {
        const double last = values_.back();
        const double scale = std::max(std::abs(last), tail_.magnitude_at(p_, kmax()));
        if (std::abs(tail_.at(p_, kmax()) - last) > kTailAgreementTol * scale) {
            throw ConfigError("declared tail disagrees with the sample at k = " + std::to_string(kmax()));
        }
    }
}

RadialFunction RadialFunction::ball_indicator(int p, int n, int r) {
    return RadialFunction(p, n, r, {1.0}, 1.0, Tail::zero());
}

double RadialFunction::at(int k) const {
    if (k < kmin_) {
        return limit_at_zero_;
    }
    if (k > kmax()) {
        return tail_.at(p_, k);
    }
    return values_[static_cast<std::size_t>(k - kmin_)];
}

RadialFunction RadialFunction::scaled(double factor) const {
    std::vector<double> v(values_);
    for (auto& x : v) {
        x *= factor;
    }
    std::vector<PowerTerm> terms(tail_.terms());
    for (auto& t : terms) {
        t.coefficient *= factor;
    }
    return RadialFunction(p_, n_, kmin_, std::move(v), limit_at_zero_ * factor, Tail::from_terms(std::move(terms)));
}

double ball_integral(const RadialFunction& f, int k) {
    const int p = f.prime();
    const int n = f.dimension();
    if (k < f.kmin()) {
        return f.limit_at_zero() * ppow(p, static_cast<double>(n) * k);
    }
    double total = f.limit_at_zero() * ppow(p, static_cast<double>(n) * (f.kmin() - 1));
    const int last = std::min(k, f.kmax());
    for (int j = f.kmin(); j <= last; ++j) {
        total += vol(p, n, j) * f.at(j);
    }
    if (k > f.kmax()) {
        for (const auto& t : f.tail().terms()) {
            total += t.coefficient * (1.0 - ppow(p, -n)) * geometric_range(p, t.exponent + n, f.kmax() + 1, k);
        }
    }
    return total;
}

double outside_integral(const RadialFunction& f, int k) {
    const int p = f.prime();
    const int n = f.dimension();
    if (k >= f.kmax()) {
        return tail_outside(f.tail(), p, n, k);
    }
    double total = tail_outside(f.tail(), p, n, f.kmax());
    for (int j = f.kmax(); j > k && j >= f.kmin(); --j) {
        total += vol(p, n, j) * f.at(j);
    }
    if (k < f.kmin() - 1) {
        total += f.limit_at_zero() *
                 (ppow(p, static_cast<double>(n) * (f.kmin() - 1)) - ppow(p, static_cast<double>(n) * k));
    }
    return total;
}

double integrate_radial(const RadialFunction& f) {
    return ball_integral(f, f.kmax()) + outside_integral(f, f.kmax());
}

double l1_norm(const RadialFunction& f) {
    const int p = f.prime();
    const int n = f.dimension();
    double total = std::abs(f.limit_at_zero()) * ppow(p, static_cast<double>(n) * (f.kmin() - 1));
    for (int j = f.kmin(); j <= f.kmax(); ++j) {
        total += vol(p, n, j) * std::abs(f.at(j));
    }
    const auto& terms = f.tail().terms();
    if (terms.empty()) {
        return total;
    }
    if (terms.size() == 1) {
        const PowerTerm abs_term{std::abs(terms.front().coefficient), terms.front().exponent};
        return total + tail_outside(Tail::from_terms({abs_term}), p, n, f.kmax());
    }
    // Mixed-sign tails: sum sphere by sphere until the closed-form bound on the
    // remainder is negligible.
    const Tail bound_tail = [&] {
        std::vector<PowerTerm> abs_terms;
        for (const auto& t : terms) {
            abs_terms.push_back({std::abs(t.coefficient), t.exponent});
        }
        return Tail::from_terms(std::move(abs_terms));
    }();
    double tail_sum = 0.0;
    for (int k = f.kmax() + 1; k < f.kmax() + 200000; ++k) {
        tail_sum += vol(p, n, k) * std::abs(f.tail().at(p, k));
        if (tail_outside(bound_tail, p, n, k) <= 1e-17 * (total + tail_sum)) {
            break;
        }
    }
    return total + tail_sum;
}

RadialFunction radial_fourier(const RadialFunction& f, std::optional<int> extension) {
    const int p = f.prime();
    const int n = f.dimension();
    const double mass = integrate_radial(f);

    int ext = 0;
    if (extension) {
        ext = std::max(0, *extension);
    } else if (!f.tail().is_zero()) {
        double scale = std::max(std::abs(mass), std::abs(f.limit_at_zero()));
        for (double v : f.values()) {
            scale = std::max(scale, std::abs(v));
        }
        // Deviation from the zero-frequency value at m = -kmax - ext - 1.
        auto deviation = [&](int m) {
            return std::abs(outside_integral(f, -m)) +
                   ppow(p, -static_cast<double>(n) * m) * std::abs(f.at(1 - m));
        };
        while (ext < 4000 && deviation(-f.kmax() - ext - 1) > 1e-17 * scale) {
            ++ext;
        }
    }

    const int mlo = -f.kmax() - ext;
    const int mhi = 1 - f.kmin();
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(mhi - mlo + 1));
    for (int m = mlo; m <= mhi; ++m) {
        out.push_back(ball_integral(f, -m) - ppow(p, -static_cast<double>(n) * m) * f.at(1 - m));
    }
    return RadialFunction(p, n, mlo, std::move(out), mass, Tail::zero());
}

RadialFunction radial_convolve(const RadialFunction& f, const RadialFunction& g) {
    require_same_space(f, g, "radial_convolve");
    const int p = f.prime();
    const int n = f.dimension();
    const double pn = ppow(p, -n);
    const int K = std::max(f.kmax(), g.kmax());
    const int lo = std::min(f.kmin(), g.kmin()) - 1;
    const int hi = K + 1;

    // Suffix sums H[k] = sum_{j > k} vol_j f_j g_j, seeded with the closed-form tail.
    double tail_product = 0.0;
    for (const auto& a : f.tail().terms()) {
        for (const auto& b : g.tail().terms()) {
            const double s = a.exponent + b.exponent + n;
            if (s >= 0.0) {
                throw DivergenceError("radial_convolve: product of the tails is not integrable");
            }
            tail_product += a.coefficient * b.coefficient * (1.0 - pn) * geometric_from(p, s, hi + 1);
        }
    }
    std::vector<double> suffix(static_cast<std::size_t>(hi - lo + 1));
    double running = tail_product;
    for (int k = hi; k >= lo; --k) {
        suffix[static_cast<std::size_t>(k - lo)] = running;
        running += vol(p, n, k) * f.at(k) * g.at(k);
    }

    // Prefix integrals over B_{k-1}.
    double f_below = ball_integral(f, lo - 1);
    double g_below = ball_integral(g, lo - 1);
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(hi - lo));
    double head = 0.0;
    for (int k = lo; k <= hi; ++k) {
        const double fk = f.at(k);
        const double gk = g.at(k);
        const double same_sphere = ppow(p, static_cast<double>(n) * k) - 2.0 * ppow(p, static_cast<double>(n) * (k - 1));
        const double v = fk * g_below + gk * f_below + fk * gk * same_sphere + suffix[static_cast<std::size_t>(k - lo)];
        if (k == lo) {
            head = v;
        } else {
            values.push_back(v);
        }
        f_below += vol(p, n, k) * fk;
        g_below += vol(p, n, k) * gk;
    }

    // Closed-form tail for k > K.
    const double f_const = ball_integral(f, K);
    const double g_const = ball_integral(g, K);
    TermAccumulator acc;
    auto prefix_constant = [&](const Tail& t, double window_part) {
        double c = window_part;
        for (const auto& term : t.terms()) {
            const double s = term.exponent + n;
            if (std::abs(s) < kExponentMergeTol) {
                throw DivergenceError("radial_convolve: tail exponent -n has a logarithmic ball integral");
            }
            c += term.coefficient * (1.0 - pn) * ppow(p, (K + 1) * s) / (1.0 - ppow(p, s));
        }
        return c;
    };
    const double F_const = prefix_constant(f.tail(), f_const);
    const double G_const = prefix_constant(g.tail(), g_const);
    for (const auto& a : f.tail().terms()) {
        acc.add(a.coefficient * G_const, a.exponent);
    }
    for (const auto& b : g.tail().terms()) {
        acc.add(b.coefficient * F_const, b.exponent);
    }
    for (const auto& a : f.tail().terms()) {
        for (const auto& b : g.tail().terms()) {
            const double s = a.exponent + b.exponent + n;
            const double from_g_prefix = -(1.0 - pn) / (1.0 - ppow(p, b.exponent + n));
            const double from_f_prefix = -(1.0 - pn) / (1.0 - ppow(p, a.exponent + n));
            const double same_sphere = 1.0 - 2.0 * pn;
            const double outer = (1.0 - pn) * ppow(p, s) / (1.0 - ppow(p, s));
            acc.add(a.coefficient * b.coefficient * (from_g_prefix + from_f_prefix + same_sphere + outer), s);
        }
    }
    return RadialFunction(p, n, lo + 1, std::move(values), head, acc.finish(p, hi));
}

RadialFunction linear_combination(double a, const RadialFunction& f, double b, const RadialFunction& g) {
    require_same_space(f, g, "linear_combination");
    const int lo = std::min(f.kmin(), g.kmin());
    const int hi = std::max(f.kmax(), g.kmax());
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(hi - lo + 1));
    for (int k = lo; k <= hi; ++k) {
        values.push_back(a * f.at(k) + b * g.at(k));
    }
    TermAccumulator acc;
    for (const auto& t : f.tail().terms()) {
        acc.add(a * t.coefficient, t.exponent);
    }
    for (const auto& t : g.tail().terms()) {
        acc.add(b * t.coefficient, t.exponent);
    }
    return RadialFunction(f.prime(), f.dimension(), lo, std::move(values),
                          a * f.limit_at_zero() + b * g.limit_at_zero(), acc.finish(f.prime(), hi));
}

RadialFunction pointwise_product(const RadialFunction& f, const RadialFunction& g) {
    require_same_space(f, g, "pointwise_product");
    const int lo = std::min(f.kmin(), g.kmin());
    const int hi = std::max(f.kmax(), g.kmax());
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(hi - lo + 1));
    for (int k = lo; k <= hi; ++k) {
        values.push_back(f.at(k) * g.at(k));
    }
    TermAccumulator acc;
    for (const auto& a : f.tail().terms()) {
        for (const auto& b : g.tail().terms()) {
            acc.add(a.coefficient * b.coefficient, a.exponent + b.exponent);
        }
    }
    return RadialFunction(f.prime(), f.dimension(), lo, std::move(values), f.limit_at_zero() * g.limit_at_zero(),
                          acc.finish(f.prime(), hi));
}

RadialFunction apply_generator(const RadialFunction& kernel_density, const RadialFunction& f) {
    return linear_combination(1.0, radial_convolve(kernel_density, f), -1.0, f);
}

} // namespace padland
