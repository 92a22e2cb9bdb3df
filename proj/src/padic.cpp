#include "padland/padic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "padland/errors.hpp"

namespace padland {

namespace {

void check_prime_dimension(int p, int n) {
    if (!is_prime(p)) {
        throw ConfigError("p must be prime, got " + std::to_string(p));
    }
    if (n < 1) {
        throw ConfigError("dimension must be at least 1, got " + std::to_string(n));
    }
}

PAdicCoset::Coordinate add_coordinate(const PAdicCoset::Coordinate& a, const PAdicCoset::Coordinate& b,
                                      int p) {
    PAdicCoset::Coordinate out;
    out.reserve(std::max(a.size(), b.size()) + 1);
    auto ia = static_cast<std::ptrdiff_t>(a.size()) - 1;
    auto ib = static_cast<std::ptrdiff_t>(b.size()) - 1;
    int carry = 0;
    int depth = 0;
    // Walk from the deepest digit toward index -1; a carry moves one step up.
    while (ia >= 0 || ib >= 0 || carry != 0) {
        if (carry != 0) {
            --depth;
        } else {
            depth = std::max(ia >= 0 ? a[static_cast<std::size_t>(ia)].depth : 0,
                             ib >= 0 ? b[static_cast<std::size_t>(ib)].depth : 0);
        }
        if (depth <= 0) {
            break;
        }
        int sum = carry;
        if (ia >= 0 && a[static_cast<std::size_t>(ia)].depth == depth) {
            sum += a[static_cast<std::size_t>(ia--)].value;
        }
        if (ib >= 0 && b[static_cast<std::size_t>(ib)].depth == depth) {
            sum += b[static_cast<std::size_t>(ib--)].value;
        }
        carry = sum / p;
        if (const int d = sum % p; d != 0) {
            out.push_back({depth, d});
        }
    }
    std::reverse(out.begin(), out.end());
    return out;
}

} // namespace

bool is_prime(int p) {
    if (p < 2) {
        return false;
    }
    for (int d = 2; d * d <= p; ++d) {
        if (p % d == 0) {
            return false;
        }
    }
    return true;
}

double sphere_volume(int p, int n, int j) {
    return std::pow(static_cast<double>(p), static_cast<double>(n) * j) * (1.0 - std::pow(p, -n));
}

double ball_volume(int p, int n, int j) {
    return std::pow(static_cast<double>(p), static_cast<double>(n) * j);
}

double CosetNorm::value(int p) const { return std::pow(static_cast<double>(p), exponent); }

PAdicCoset::PAdicCoset(int p, int n) : p_(p) {
    check_prime_dimension(p, n);
    coords_.resize(static_cast<std::size_t>(n));
}

PAdicCoset PAdicCoset::from_digits(int p, const std::vector<std::vector<std::pair<int, int>>>& coords) {
    check_prime_dimension(p, static_cast<int>(coords.size()));
    std::vector<Coordinate> out(coords.size());
    for (std::size_t i = 0; i < coords.size(); ++i) {
        for (const auto& [index, value] : coords[i]) {
            if (index > -1) {
                throw DomainError("fractional digit index must be <= -1, got " + std::to_string(index));
            }
            if (value < 0 || value >= p) {
                throw DomainError("digit " + std::to_string(value) + " outside 0.." + std::to_string(p - 1));
            }
            if (value != 0) {
                out[i].push_back({-index, value});
            }
        }
        std::sort(out[i].begin(), out[i].end(), [](const Digit& x, const Digit& y) { return x.depth < y.depth; });
        const auto dup = std::adjacent_find(out[i].begin(), out[i].end(),
                                            [](const Digit& x, const Digit& y) { return x.depth == y.depth; });
        if (dup != out[i].end()) {
            throw DomainError("digit index " + std::to_string(-dup->depth) + " given twice");
        }
    }
    return PAdicCoset(p, std::move(out));
}

PAdicCoset PAdicCoset::from_fractions(int p, const std::vector<std::pair<std::uint64_t, int>>& fractions) {
    std::vector<std::vector<std::pair<int, int>>> coords(fractions.size());
    for (std::size_t i = 0; i < fractions.size(); ++i) {
        auto [numerator, k] = fractions[i];
        // a / p^k: base-p digit b_m of a sits at index m - k; m >= k is integral.
        for (int m = 0; m < k && numerator != 0; ++m) {
            coords[i].emplace_back(m - k, static_cast<int>(numerator % static_cast<std::uint64_t>(p)));
            numerator /= static_cast<std::uint64_t>(p);
        }
    }
    return from_digits(p, coords);
}

bool PAdicCoset::is_zero() const noexcept {
    return std::all_of(coords_.begin(), coords_.end(), [](const Coordinate& c) { return c.empty(); });
}

int PAdicCoset::digit(int i, int depth) const {
    const auto& c = coordinate(i);
    const auto it = std::lower_bound(c.begin(), c.end(), depth,
                                     [](const Digit& d, int value) { return d.depth < value; });
    return (it != c.end() && it->depth == depth) ? it->value : 0;
}

int PAdicCoset::lowest_index() const noexcept {
    int deepest = 0;
    for (const auto& c : coords_) {
        if (!c.empty()) {
            deepest = std::max(deepest, c.back().depth);
        }
    }
    return -deepest;
}

double PAdicCoset::fractional_value(int i) const {
    double v = 0.0;
    for (const auto& d : coordinate(i)) {
        v += d.value * std::pow(static_cast<double>(p_), -d.depth);
    }
    return v;
}

PAdicCoset coset_add(const PAdicCoset& a, const PAdicCoset& b) {
    if (a.p_ != b.p_ || a.coords_.size() != b.coords_.size()) {
        throw ConfigError("coset_add: mismatched prime or dimension");
    }
    std::vector<PAdicCoset::Coordinate> out(a.coords_.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = add_coordinate(a.coords_[i], b.coords_[i], a.p_);
    }
    return PAdicCoset(a.p_, std::move(out));
}

PAdicCoset coset_negate(const PAdicCoset& a) {
    std::vector<PAdicCoset::Coordinate> out(a.coords_.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const auto& c = a.coords_[i];
        if (c.empty()) {
            continue;
        }
        // -x mod Z_p: complement every digit above the deepest one, p - d at it.
        const int deepest = c.back().depth;
        auto& o = out[i];
        std::size_t next = 0;
        for (int depth = 1; depth < deepest; ++depth) {
            int d = 0;
            if (next < c.size() && c[next].depth == depth) {
                d = c[next++].value;
            }
            if (const int v = a.p_ - 1 - d; v != 0) {
                o.push_back({depth, v});
            }
        }
        o.push_back({deepest, a.p_ - c.back().value});
    }
    return PAdicCoset(a.p_, std::move(out));
}

CosetNorm coset_norm(const PAdicCoset& a) { return a.norm(); }

PAdicCoset sample_sphere_coset(int p, int n, int j, Stream& rng) {
    check_prime_dimension(p, n);
    if (j < 1) {
        throw DomainError("sample_sphere_coset requires j >= 1, got " + std::to_string(j));
    }
    const auto up = static_cast<std::uint64_t>(p);
    std::vector<PAdicCoset::Coordinate> coords(static_cast<std::size_t>(n));
    std::vector<int> top(static_cast<std::size_t>(n));
    // Top layer: uniform on {0..p-1}^n minus the zero tuple, by rejection.
    for (;;) {
        bool any = false;
        for (auto& d : top) {
            d = static_cast<int>(rng.uniform_below(up));
            any = any || d != 0;
        }
        if (any) {
            break;
        }
    }
    for (int i = 0; i < n; ++i) {
        auto& c = coords[static_cast<std::size_t>(i)];
        c.reserve(static_cast<std::size_t>(j));
        for (int depth = 1; depth < j; ++depth) {
            if (const int d = static_cast<int>(rng.uniform_below(up)); d != 0) {
                c.push_back({depth, d});
            }
        }
        if (top[static_cast<std::size_t>(i)] != 0) {
            c.push_back({j, top[static_cast<std::size_t>(i)]});
        }
    }
    return PAdicCoset(p, std::move(coords));
}

} // namespace padland
