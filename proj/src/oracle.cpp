#include "ictmc/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ictmc {

namespace {

constexpr double kMaxChunkRate = 30.0;
constexpr std::size_t kMaxSeriesTerms = 10'000;

SquareMatrix power(SquareMatrix base, std::uint64_t exponent) {
    SquareMatrix result = SquareMatrix::identity(base.space());
    bool first = true;
    while (exponent > 0) {
        if (exponent & 1u) {
            result = first ? base : result * base;
            first = false;
        }
        exponent >>= 1u;
        if (exponent > 0) base = base * base;
    }
    return result;
}

SquareMatrix uniformized_series(const SquareMatrix& p, double rate_times_time) {
    const StateSpace& space = p.space();
    double weight = std::exp(-rate_times_time);
    double cumulative = weight;
    SquareMatrix term = SquareMatrix::identity(space);
    SquareMatrix sum = weight * term;
    for (std::size_t k = 1; k < kMaxSeriesTerms; ++k) {
        if (1.0 - cumulative < kUniformizationTail && static_cast<double>(k) > rate_times_time) break;
        weight *= rate_times_time / static_cast<double>(k);
        cumulative += weight;
        term = term * p;
        sum = sum + weight * term;
    }
    return sum;
}

} // namespace

TransitionMatrix matrix_exponential(const RateMatrix& q, double delta) {
    if (!std::isfinite(delta) || delta < 0.0) throw InvalidArgument("delta must be finite and non-negative");
    const StateSpace& space = q.space();
    const std::size_t n = q.size();
    double max_exit = 0.0;
    for (std::size_t x = 0; x < n; ++x) max_exit = std::max(max_exit, std::abs(q(x, x)));
    if (delta == 0.0 || max_exit == 0.0) return TransitionMatrix(SquareMatrix::identity(space));

    const double lambda = max_exit + 1.0;
    const SquareMatrix p = SquareMatrix::identity(space) + (1.0 / lambda) * q.matrix();
    const double total = lambda * delta;
    const auto chunks = static_cast<std::uint64_t>(std::max(1.0, std::ceil(total / kMaxChunkRate)));
    const SquareMatrix chunk = uniformized_series(p, total / static_cast<double>(chunks));
    return TransitionMatrix(chunks == 1 ? chunk : power(chunk, chunks));
}

PiecewiseSystem::PiecewiseSystem(std::vector<double> breakpoints, std::vector<RateMatrix> rates)
    : breakpoints_(std::move(breakpoints)), rates_(std::move(rates)) {
    if (breakpoints_.empty() || breakpoints_.size() != rates_.size()) {
        throw InvalidArgument("need one rate matrix per breakpoint");
    }
    if (breakpoints_.front() != 0.0) throw InvalidArgument("the first breakpoint must be 0");
    for (std::size_t i = 1; i < breakpoints_.size(); ++i) {
        if (!(breakpoints_[i - 1] < breakpoints_[i]) || !std::isfinite(breakpoints_[i])) {
            throw InvalidArgument("breakpoints must be finite and strictly increasing");
        }
        require_same_space(rates_.front().space(), rates_[i].space());
    }
}

Gamble piecewise_expectation(const PiecewiseSystem& system, double t, double s, const Gamble& f) {
    if (!(t >= 0.0) || !(t <= s) || !std::isfinite(s)) throw InvalidArgument("need 0 <= t <= s");
    const auto& b = system.breakpoints();
    Gamble g = f;
    for (std::size_t j = b.size(); j-- > 0;) {
        const double piece_end = j + 1 < b.size() ? b[j + 1] : std::numeric_limits<double>::infinity();
        const double lo = std::max(t, b[j]);
        const double hi = std::min(s, piece_end);
        if (hi > lo) g = apply_matrix(matrix_exponential(system.rates()[j], hi - lo).matrix(), g);
    }
    return g;
}

Gamble greedy_markov_scheme(const LowerEnvelope& env, double t, double s, std::size_t n, const Gamble& f) {
    if (n == 0) throw InvalidArgument("need at least one step");
    if (!(t >= 0.0) || !(t <= s)) throw InvalidArgument("need 0 <= t <= s");
    require_same_space(env.space(), f.space());
    const double delta = (s - t) / static_cast<double>(n);
    Gamble g = f;
    for (std::size_t i = 0; i < n; ++i) {
        const RateMatrix q = env.achieving_member(g);
        g = apply_matrix(matrix_exponential(q, delta).matrix(), g);
    }
    return g;
}

Gamble exhaustive_markov_min(std::span<const RateMatrix> vertices, double t, double s, std::size_t n,
                             const Gamble& f) {
    if (vertices.empty()) throw InvalidArgument("need at least one vertex");
    if (n == 0) throw InvalidArgument("need at least one step");
    if (!(t >= 0.0) || !(t <= s)) throw InvalidArgument("need 0 <= t <= s");
    std::size_t sequences = 1;
    for (std::size_t i = 0; i < n; ++i) {
        if (sequences > kExhaustiveBudget / vertices.size()) {
            throw InvalidArgument("exhaustive search exceeds the sequence budget");
        }
        sequences *= vertices.size();
    }
    for (const auto& v : vertices) require_same_space(v.space(), f.space());

    const double delta = (s - t) / static_cast<double>(n);
    std::vector<SquareMatrix> steps;
    for (const auto& v : vertices) steps.push_back(matrix_exponential(v, delta).matrix());

    std::vector<double> best(f.size(), std::numeric_limits<double>::infinity());
    // Depth-first over the step choices, latest step applied first.
    std::vector<Gamble> stack{f};
    auto descend = [&](auto& self, std::size_t depth) -> void {
        if (depth == n) {
            const Gamble& leaf = stack.back();
            for (std::size_t x = 0; x < best.size(); ++x) best[x] = std::min(best[x], leaf[x]);
            return;
        }
        for (const auto& step : steps) {
            stack.push_back(apply_matrix(step, stack.back()));
            self(self, depth + 1);
            stack.pop_back();
        }
    };
    descend(descend, 0);
    return Gamble(f.space(), std::move(best));
}

double example8_closed_form(double lambda, double t) {
    if (!(lambda >= 0.01 && lambda <= 0.5)) throw InvalidArgument("lambda must lie in [0.01, 0.5]");
    if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidArgument("t must be finite and non-negative");
    const double slow = std::exp(-t / 100.0);
    if (lambda == 0.01) return 2.0 - slow - t / 50.0 * slow;
    const double fast = std::exp(-lambda * t);
    return 2.0 + fast + 2.0 * (fast - 100.0 * lambda * slow) / (100.0 * lambda - 1.0);
}

double whm_grid_search(std::span<const double> lambda_grid, double t) {
    if (lambda_grid.empty()) throw InvalidArgument("lambda grid must be non-empty");
    double best = std::numeric_limits<double>::infinity();
    for (double lambda : lambda_grid) best = std::min(best, example8_closed_form(lambda, t));
    return best;
}

std::vector<double> uniform_grid(double lo, double hi, std::size_t m) {
    if (m == 0) throw InvalidArgument("grid needs at least one point");
    if (m == 1) return {lo};
    std::vector<double> grid(m);
    for (std::size_t i = 0; i < m; ++i) {
        grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(m - 1);
    }
    grid.back() = hi;
    return grid;
}

std::optional<std::pair<std::size_t, std::size_t>> single_free_entry(const RateSetSpec& spec) {
    if (spec.kind() != RateSetSpec::Kind::interval) return std::nullopt;
    std::optional<std::pair<std::size_t, std::size_t>> found;
    const auto& lo = spec.lower_bounds();
    const auto& hi = spec.upper_bounds();
    for (std::size_t x = 0; x < lo.size(); ++x) {
        for (std::size_t y = 0; y < lo.size(); ++y) {
            if (x == y || lo(x, y) == hi(x, y)) continue;
            if (found) return std::nullopt;
            found = std::make_pair(x, y);
        }
    }
    return found;
}

double single_parameter_whm(const RateSetSpec& spec, std::size_t state, const Gamble& f, double t,
                            std::size_t points) {
    const auto entry = single_free_entry(spec);
    if (!entry) throw InvalidArgument("rate set is not a single-parameter interval family");
    require_same_space(spec.space(), f.space());
    const auto& lo = spec.lower_bounds();
    const std::size_t n = lo.size();
    const auto [row, col] = *entry;
    double best = std::numeric_limits<double>::infinity();
    for (double lambda : uniform_grid(lo(row, col), spec.upper_bounds()(row, col), points)) {
        std::vector<double> e(lo.entries().begin(), lo.entries().end());
        e[row * n + col] = lambda;
        for (std::size_t x = 0; x < n; ++x) {
            double off = 0.0;
            for (std::size_t y = 0; y < n; ++y) off += y == x ? 0.0 : e[x * n + y];
            e[x * n + x] = -off;
        }
        const RateMatrix q{SquareMatrix(spec.space(), std::move(e))};
        best = std::min(best, apply_matrix(matrix_exponential(q, t).matrix(), f)[state]);
    }
    return best;
}

} // namespace ictmc
