#pragma once

// Test-only reference computations. Nothing here calls into the library's
// series or convolution code; the oracles work on finite quotient groups or by
// quadrature.

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <vector>

#include "padland/radial.hpp"
#include "padland/rng.hpp"

namespace oracle {

inline int valuation(std::int64_t a, int p) {
    int v = 0;
    while (a % p == 0) {
        a /= p;
        ++v;
    }
    return v;
}

/// Finite model of B_K / B_L in dimension n = 1: the residue a in Z/p^M (M = K - L)
/// stands for the coset of x = p^{-K} a, whose norm is p^{K - v_p(a)} (a != 0) and
/// lies in B_L for a = 0. Every coset has Haar measure p^L.
struct CyclicModel {
    int p;
    int K;
    int L;

    std::int64_t size() const { return static_cast<std::int64_t>(std::llround(std::pow(p, K - L))); }

    // Sphere exponent of residue a, or L for the zero residue (value taken from the head).
    int exponent(std::int64_t a) const { return a == 0 ? L : K - valuation(a, p); }

    std::vector<double> sample(const padland::RadialFunction& f) const {
        std::vector<double> out(static_cast<std::size_t>(size()));
        for (std::int64_t a = 0; a < size(); ++a) {
            out[static_cast<std::size_t>(a)] = f.at(exponent(a));
        }
        return out;
    }

    /// Group convolution with Haar weight p^L.
    std::vector<double> convolve(const std::vector<double>& f, const std::vector<double>& g) const {
        const auto N = size();
        std::vector<double> out(static_cast<std::size_t>(N), 0.0);
        const double w = std::pow(p, L);
        for (std::int64_t x = 0; x < N; ++x) {
            double s = 0.0;
            for (std::int64_t y = 0; y < N; ++y) {
                s += f[static_cast<std::size_t>(((x - y) % N + N) % N)] * g[static_cast<std::size_t>(y)];
            }
            out[static_cast<std::size_t>(x)] = s * w;
        }
        return out;
    }

    /// Character sum (Ff)(xi) with xi = p^L b, ||xi|| = p^{-L - v_p(b)}.
    double fourier(const std::vector<double>& f, std::int64_t b) const {
        const auto N = size();
        double s = 0.0;
        for (std::int64_t a = 0; a < N; ++a) {
            const auto ab = (a * b) % N;
            s += f[static_cast<std::size_t>(a)] * std::cos(2.0 * std::numbers::pi * static_cast<double>(ab) / static_cast<double>(N));
        }
        return s * std::pow(p, L);
    }
};

/// Random radial table with zero tail: constant on B_{kmin-1}, supported in B_kmax.
inline padland::RadialFunction random_compact(int p, int n, int kmin, int kmax, padland::Stream& rng,
                                              bool nonnegative = false) {
    std::vector<double> v;
    for (int k = kmin; k <= kmax; ++k) {
        v.push_back(nonnegative ? rng.uniform() : 2.0 * rng.uniform() - 1.0);
    }
    const double head = nonnegative ? rng.uniform() : 2.0 * rng.uniform() - 1.0;
    return padland::RadialFunction(p, n, kmin, std::move(v), head);
}

/// Random radial table whose tail is a single decaying power c p^{k e} (e < -n).
inline padland::RadialFunction random_power_tail(int p, int n, int kmin, int kmax, double e, padland::Stream& rng) {
    std::vector<double> v;
    for (int k = kmin; k < kmax; ++k) {
        v.push_back(2.0 * rng.uniform() - 1.0);
    }
    const double c = 0.5 + rng.uniform();
    v.push_back(c * std::pow(p, kmax * e));
    return padland::RadialFunction(p, n, kmin, std::move(v), 2.0 * rng.uniform() - 1.0, padland::Tail::power(c, e));
}

/// Radial function whose transform is a random table supported in the ball of
/// radius p^M: the spectrum is random on [M - W + 1, M], constant below, and
/// zero beyond p^M.
inline padland::RadialFunction random_admissible(int p, int n, int M, int W, padland::Stream& rng) {
    const auto spectrum = random_compact(p, n, M - W + 1, M, rng);
    return padland::radial_fourier(spectrum);
}

/// Nonnegative admissible data: a positive combination of indicators of balls of
/// radius p^r with -M <= r < -M + W.
inline padland::RadialFunction random_positive_admissible(int p, int n, int M, int W, padland::Stream& rng) {
    auto f = padland::RadialFunction::ball_indicator(p, n, -M).scaled(rng.uniform());
    for (int r = -M + 1; r < -M + W; ++r) {
        f = padland::linear_combination(1.0, f, rng.uniform(), padland::RadialFunction::ball_indicator(p, n, r));
    }
    return f;
}

/// Adaptive Simpson quadrature of a smooth integrand on [a, b].
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                               int depth = 60) {
    std::function<double(double, double, double, double, double, double, double, int)> rec =
        [&](double lo, double hi, double flo, double fmid, double fhi, double whole, double eps, int d) {
            const double mid = 0.5 * (lo + hi);
            const double lm = 0.5 * (lo + mid);
            const double rm = 0.5 * (mid + hi);
            const double flm = f(lm);
            const double frm = f(rm);
            const double left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
            const double right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
            if (d <= 0 || std::abs(left + right - whole) <= 15.0 * eps) {
                return left + right + (left + right - whole) / 15.0;
            }
            return rec(lo, mid, flo, flm, fmid, left, eps / 2.0, d - 1) +
                   rec(mid, hi, fmid, frm, fhi, right, eps / 2.0, d - 1);
        };
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    return rec(a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, depth);
}

} // namespace oracle
