#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "padland/rng.hpp"

namespace padland {

bool is_prime(int p);

/// Volume of the sphere S_j^n = {x : ||x||_p = p^j} under the Haar measure with
/// vol(Z_p^n) = 1, i.e. p^{nj}(1 - p^{-n}).
double sphere_volume(int p, int n, int j);

/// Volume of the ball B_j^n = {x : ||x||_p <= p^j}, i.e. p^{nj}.
double ball_volume(int p, int n, int j);

/// Norm of a coset of Q_p^n / Z_p^n.
///
/// The coset of zero carries every point of the unit ball, so its norm is reported
/// as the sentinel "inside the unit ball" (exponent 0, value treated as 1).
struct CosetNorm {
    int exponent = 0;  ///< norm is p^exponent; 0 means inside the unit ball

    bool inside_unit_ball() const noexcept { return exponent == 0; }
    double value(int p) const;

    friend bool operator==(const CosetNorm&, const CosetNorm&) = default;
    friend auto operator<=>(const CosetNorm&, const CosetNorm&) = default;
};

/// An element of Q_p^n / Z_p^n, stored as n sparse sequences of fractional
/// digits.
///
/// Coordinate i holds the digits of {x_i}_p: a digit d at depth k contributes
/// d * p^{-k}. Only nonzero digits are stored, sorted by depth, so the zero coset
/// has every coordinate empty. Values are immutable.
class PAdicCoset {
public:
    struct Digit {
        int depth;  ///< k >= 1; the digit sits at index -k
        int value;  ///< 1 .. p-1

        friend bool operator==(const Digit&, const Digit&) = default;
    };
    using Coordinate = std::vector<Digit>;

    /// Zero coset of Q_p^n / Z_p^n.
    PAdicCoset(int p, int n);

    /// Builds a coset from (index, digit) pairs per coordinate, indices in
    /// {-1, -2, ...}. Zero digits are dropped; repeated indices are rejected.
    static PAdicCoset from_digits(int p, const std::vector<std::vector<std::pair<int, int>>>& coords);

    /// Coset of (a_1 / p^{k_1}, ..., a_n / p^{k_n}) with integers a_i >= 0.
    static PAdicCoset from_fractions(int p, const std::vector<std::pair<std::uint64_t, int>>& fractions);

    int prime() const noexcept { return p_; }
    int dimension() const noexcept { return static_cast<int>(coords_.size()); }
    const Coordinate& coordinate(int i) const { return coords_.at(static_cast<std::size_t>(i)); }

    bool is_zero() const noexcept;

    /// Digit at index -depth of coordinate i (0 when not stored).
    int digit(int i, int depth) const;

    /// Lowest nonzero digit index over all coordinates, i.e. -(norm exponent);
    /// 0 for the zero coset.
    int lowest_index() const noexcept;

    CosetNorm norm() const noexcept { return CosetNorm{-lowest_index()}; }

    /// The fractional part of coordinate i as a double.
    double fractional_value(int i) const;

    friend bool operator==(const PAdicCoset&, const PAdicCoset&) = default;

private:
    PAdicCoset(int p, std::vector<Coordinate> coords) : p_(p), coords_(std::move(coords)) {}

    friend PAdicCoset coset_add(const PAdicCoset&, const PAdicCoset&);
    friend PAdicCoset coset_negate(const PAdicCoset&);
    friend PAdicCoset sample_sphere_coset(int, int, int, Stream&);

    int p_;
    std::vector<Coordinate> coords_;
};

/// Group law of Q_p^n / Z_p^n. Carries out of index -1 land in Z_p^n and vanish.
/// Throws ConfigError when p or n differ.
PAdicCoset coset_add(const PAdicCoset& a, const PAdicCoset& b);

/// Additive inverse: coset_add(a, coset_negate(a)) is the zero coset.
PAdicCoset coset_negate(const PAdicCoset& a);

CosetNorm coset_norm(const PAdicCoset& a);

/// Haar-uniform point of the sphere S_j^n, reduced mod Z_p^n (j >= 1).
///
/// Digits at indices -j+1 .. -1 are uniform; the top layer (index -j across all
/// coordinates) is uniform on {0..p-1}^n without the all-zero tuple. Every coset
/// of norm p^j is equally likely. Throws DomainError for j < 1.
PAdicCoset sample_sphere_coset(int p, int n, int j, Stream& rng);

} // namespace padland
