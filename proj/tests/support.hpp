#pragma once

// Helpers shared by the test suites: fixtures from the worked examples,
// seeded random generators and small independent reference formulas.

#include "ictmc/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <span>
#include <vector>

namespace ictmc::testing {

inline StateSpace health_space() { return StateSpace({"h", "s"}); }

/// Rate a (h -> s) in [1/52, 3/52], rate b (s -> h) in [1/2, 2].
inline RateSetSpec health_spec() {
    const auto space = health_space();
    return RateSetSpec::interval(SquareMatrix(space, {{0.0, 1.0 / 52.0}, {0.5, 0.0}}),
                                 SquareMatrix(space, {{0.0, 3.0 / 52.0}, {2.0, 0.0}}));
}

inline RateMatrix matrix_a(const StateSpace& space) { return RateMatrix(SquareMatrix(space, {{-1.0, 1.0}, {2.0, -2.0}})); }
inline RateMatrix matrix_b(const StateSpace& space) { return RateMatrix(SquareMatrix(space, {{-3.0, 3.0}, {1.0, -1.0}})); }

inline RateSetSpec two_vertex_spec() {
    const auto space = StateSpace({"a", "b"});
    return RateSetSpec::finite({matrix_a(space), matrix_b(space)}, true);
}

/// Rate a -> b in [0.01, 0.5], b -> c fixed at 0.01, c absorbing.
inline RateSetSpec ternary_spec() {
    const auto space = StateSpace({"a", "b", "c"});
    return RateSetSpec::interval(SquareMatrix(space, {{0.0, 0.01, 0.0}, {0.0, 0.0, 0.01}, {0.0, 0.0, 0.0}}),
                                 SquareMatrix(space, {{0.0, 0.5, 0.0}, {0.0, 0.0, 0.01}, {0.0, 0.0, 0.0}}));
}

/// e^{Qt} for Q = [[-a, a], [b, -b]], from the closed-form solution of the
/// two-state forward equation.
inline std::vector<double> two_state_exponential(double a, double b, double t) {
    const double r = a + b;
    if (r == 0.0) return {1.0, 0.0, 0.0, 1.0};
    const double e = std::exp(-r * t);
    return {(b + a * e) / r, (a - a * e) / r, (b - b * e) / r, (a + b * e) / r};
}

inline Gamble random_gamble(const StateSpace& space, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> d(lo, hi);
    std::vector<double> v(space.size());
    for (auto& x : v) x = d(rng);
    return Gamble(space, std::move(v));
}

/// A random rate matrix with the given largest exit rate.
inline RateMatrix random_rate_matrix(const StateSpace& space, std::mt19937_64& rng, double max_exit) {
    const std::size_t n = space.size();
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> e(n * n, 0.0);
    std::vector<double> exit(n, 0.0);
    for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y = 0; y < n; ++y) {
            if (x != y) exit[x] += e[x * n + y] = u(rng);
        }
    }
    double largest = 0.0;
    for (double r : exit) largest = std::max(largest, r);
    const double scale = largest > 0.0 ? max_exit / largest : 0.0;
    for (std::size_t x = 0; x < n; ++x) {
        double off = 0.0;
        for (std::size_t y = 0; y < n; ++y) {
            if (x == y) continue;
            e[x * n + y] *= scale;
            off += e[x * n + y];
        }
        e[x * n + x] = -off;
    }
    return RateMatrix(SquareMatrix(space, std::move(e)));
}

/// Interval spec with random bounds below max_rate.
inline RateSetSpec random_interval_spec(const StateSpace& space, std::mt19937_64& rng, double max_rate) {
    const std::size_t n = space.size();
    std::uniform_real_distribution<double> u(0.0, max_rate);
    std::vector<double> lo(n * n, 0.0), hi(n * n, 0.0);
    for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y = 0; y < n; ++y) {
            if (x == y) continue;
            double p = u(rng), q = u(rng);
            if (p > q) std::swap(p, q);
            lo[x * n + y] = p;
            hi[x * n + y] = q;
        }
    }
    return RateSetSpec::interval(SquareMatrix(space, lo), SquareMatrix(space, hi));
}

inline RateSetSpec random_finite_spec(const StateSpace& space, std::mt19937_64& rng, std::size_t members,
                                      double max_exit) {
    std::vector<RateMatrix> list;
    for (std::size_t i = 0; i < members; ++i) list.push_back(random_rate_matrix(space, rng, max_exit));
    return RateSetSpec::finite(std::move(list), false);
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

} // namespace ictmc::testing
