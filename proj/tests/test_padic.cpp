#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "padland/errors.hpp"
#include "padland/padic.hpp"
#include "padland/rng.hpp"

using namespace padland;

namespace {

PAdicCoset random_coset(int p, int n, int max_depth, Stream& rng) {
    std::vector<std::vector<std::pair<int, int>>> coords(static_cast<std::size_t>(n));
    for (auto& c : coords) {
        const int depth = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(max_depth) + 1));
        for (int d = 1; d <= depth; ++d) {
            c.emplace_back(-d, static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(p))));
        }
    }
    return PAdicCoset::from_digits(p, coords);
}

int norm_or_one(const PAdicCoset& a) { return a.norm().exponent; }

} // namespace

TEST_CASE("philox4x32-10 known-answer vectors") {
    const auto zero = Philox4x32::apply({0, 0, 0, 0}, {0, 0});
    CHECK(zero == Philox4x32::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    const auto ones = Philox4x32::apply({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                        {0xffffffffu, 0xffffffffu});
    CHECK(ones == Philox4x32::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    const auto pi = Philox4x32::apply({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                      {0xa4093822u, 0x299f31d0u});
    CHECK(pi == Philox4x32::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("streams are reproducible and distinct") {
    Stream a(42, 7), b(42, 7), c(42, 8), d(43, 7);
    for (int i = 0; i < 10; ++i) {
        const auto x = a();
        CHECK(x == b());
        CHECK(x != c());
        CHECK(x != d());
    }
}

TEST_CASE("coset_add examples") {
    const PAdicCoset zero(2, 1);
    CHECK(coset_add(zero, zero).is_zero());

    const auto half = PAdicCoset::from_fractions(2, {{1, 1}});
    CHECK(coset_add(half, half).is_zero());

    const auto quarter = PAdicCoset::from_fractions(2, {{1, 2}});
    const auto sum = coset_add(half, quarter);
    CHECK(sum == PAdicCoset::from_fractions(2, {{3, 2}}));
    CHECK(sum.fractional_value(0) == doctest::Approx(0.75));
    CHECK(sum.norm().value(2) == 4.0);

    CHECK_THROWS_AS(coset_add(PAdicCoset(2, 1), PAdicCoset(3, 1)), ConfigError);
    CHECK_THROWS_AS(coset_add(PAdicCoset(2, 1), PAdicCoset(2, 2)), ConfigError);
}

TEST_CASE("carries propagate across several digits") {
    // 7/8 + 1/8 = 1 in Z_2; 5/9 + 5/9 = 10/9 = 1/9 mod Z_3.
    CHECK(coset_add(PAdicCoset::from_fractions(2, {{7, 3}}), PAdicCoset::from_fractions(2, {{1, 3}})).is_zero());
    CHECK(coset_add(PAdicCoset::from_fractions(3, {{5, 2}}), PAdicCoset::from_fractions(3, {{5, 2}})) ==
          PAdicCoset::from_fractions(3, {{1, 2}}));
}

TEST_CASE("coset_norm examples") {
    CHECK(PAdicCoset(5, 3).norm().inside_unit_ball());
    const auto c = PAdicCoset::from_digits(3, {{{-2, 1}}});
    CHECK(c.norm().exponent == 2);
    CHECK(c.norm().value(3) == 9.0);
    const auto d = PAdicCoset::from_digits(2, {{{-1, 1}}, {{-3, 1}, {-1, 1}}});
    CHECK(coset_norm(d).value(2) == 8.0);
}

TEST_CASE("canonical form rejects bad digits and drops zeros") {
    CHECK_THROWS_AS(PAdicCoset::from_digits(3, {{{-1, 3}}}), DomainError);
    CHECK_THROWS_AS(PAdicCoset::from_digits(3, {{{0, 1}}}), DomainError);
    CHECK_THROWS_AS(PAdicCoset::from_digits(3, {{{-1, 1}, {-1, 2}}}), DomainError);
    const auto c = PAdicCoset::from_digits(3, {{{-4, 0}, {-1, 2}}});
    CHECK(c.coordinate(0).size() == 1);
    CHECK(c.norm().exponent == 1);
    CHECK(PAdicCoset::from_digits(3, {{{-4, 0}}}).is_zero());
}

TEST_CASE("sphere volumes") {
    CHECK(sphere_volume(2, 1, 0) == 0.5);
    CHECK(sphere_volume(3, 2, 1) == doctest::Approx(8.0).epsilon(1e-15));
    double total = 0.0;
    for (int j = -20; j <= 0; ++j) {
        total += sphere_volume(2, 1, j);
    }
    // The missing mass is the ball of radius 2^-21.
    CHECK(std::abs(total + ball_volume(2, 1, -21) - 1.0) < 1e-12);
    CHECK(std::abs(total - 1.0) < 1e-6);
}

TEST_CASE("group axioms and ultrametric inequality on random cosets") {
    Stream rng(2024, 0);
    for (int p : {2, 3, 5}) {
        for (int n : {1, 2, 3}) {
            for (int trial = 0; trial < 200; ++trial) {
                const auto a = random_coset(p, n, 8, rng);
                const auto b = random_coset(p, n, 8, rng);
                const auto c = random_coset(p, n, 8, rng);
                CHECK(coset_add(a, b) == coset_add(b, a));
                CHECK(coset_add(coset_add(a, b), c) == coset_add(a, coset_add(b, c)));
                CHECK(coset_add(a, PAdicCoset(p, n)) == a);
                CHECK(coset_add(a, coset_negate(a)).is_zero());

                const int na = norm_or_one(a);
                const int nb = norm_or_one(b);
                const int ns = norm_or_one(coset_add(a, b));
                CHECK(ns <= std::max(na, nb));
                if (na != nb) {
                    CHECK(ns == std::max(na, nb));
                }
            }
        }
    }
}

TEST_CASE("sample_sphere_coset postconditions") {
    Stream rng(1, 1);
    const auto half = PAdicCoset::from_fractions(2, {{1, 1}});
    for (int i = 0; i < 100; ++i) {
        CHECK(sample_sphere_coset(2, 1, 1, rng) == half);
        CHECK(sample_sphere_coset(2, 1, 2, rng).norm().value(2) == 4.0);
        CHECK(sample_sphere_coset(3, 2, 5, rng).norm().exponent == 5);
    }
    CHECK_THROWS_AS(sample_sphere_coset(2, 1, 0, rng), DomainError);
}

TEST_CASE("j=1, p=3: the two atoms are equally likely") {
    Stream rng(99, 0);
    const int draws = 100000;
    int third = 0;
    const auto one_third = PAdicCoset::from_fractions(3, {{1, 1}});
    for (int i = 0; i < draws; ++i) {
        const auto c = sample_sphere_coset(3, 1, 1, rng);
        third += (c == one_third) ? 1 : 0;
    }
    const double freq = static_cast<double>(third) / draws;
    const double sigma = std::sqrt(0.25 / draws);
    CHECK(std::abs(freq - 0.5) < 3.0 * sigma);
}

TEST_CASE("sampling law: every coset of norm p^j is equally likely (chi-square)") {
    struct Case {
        int p, n, j;
        double critical;  // chi-square 0.999 quantile for (cells - 1) dof
    };
    // (p, n, j) -> p^{nj} - p^{n(j-1)} cells: 6 (3,1,2), 12 (2,2,2), 28 (2,1,5) -> 16 cells
    for (const Case c : {Case{3, 1, 2, 20.515}, Case{2, 2, 2, 31.264}, Case{2, 1, 5, 37.697}}) {
        Stream rng(7, static_cast<std::uint64_t>(c.p * 100 + c.n * 10 + c.j));
        const int draws = 100000;
        std::map<std::vector<double>, int> counts;
        for (int i = 0; i < draws; ++i) {
            const auto s = sample_sphere_coset(c.p, c.n, c.j, rng);
            std::vector<double> key;
            for (int k = 0; k < c.n; ++k) {
                key.push_back(s.fractional_value(k));
            }
            ++counts[key];
        }
        const double cells = std::pow(c.p, c.n * c.j) - std::pow(c.p, c.n * (c.j - 1));
        CHECK(static_cast<double>(counts.size()) == cells);
        const double expected = draws / cells;
        double chi2 = 0.0;
        for (const auto& [key, count] : counts) {
            chi2 += (count - expected) * (count - expected) / expected;
        }
        CHECK(chi2 < c.critical);
    }
}
