#include "ictmc/transition.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace ictmc {

namespace {

// Δ·‖Q̲‖ may land one rounding step above 1 for Δ = (s-t)/n.
constexpr double kStepSizeSlack = 1e-12;

void check_step_size(double delta, double norm) {
    if (!(delta >= 0.0) || !std::isfinite(delta)) throw StepSizeError("step size must be finite and non-negative");
    if (delta * norm > 1.0 + kStepSizeSlack) {
        throw StepSizeError("step size times the norm bound exceeds 1");
    }
}

// g <- g + Δ Q̲ g, n times; scratch holds Q̲ g.
void iterate(const LowerEnvelope& env, std::vector<double>& g, std::vector<double>& scratch, double delta,
             std::uint64_t n) {
    for (std::uint64_t i = 0; i < n; ++i) {
        env.lower_apply_into(g, scratch);
        for (std::size_t x = 0; x < g.size(); ++x) g[x] += delta * scratch[x];
    }
}

} // namespace

void OperatorQuery::validate() const {
    if (!std::isfinite(t) || !std::isfinite(s) || t < 0.0) throw InvalidArgument("time points must be finite and non-negative");
    if (t > s) throw InvalidArgument("need t <= s");
    if (!std::isfinite(epsilon) || !(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
}

std::uint64_t step_count(double t, double s, double norm, double fvar, double epsilon, std::uint64_t cap) {
    OperatorQuery{t, s, epsilon}.validate();
    if (!(norm >= 0.0) || !(fvar >= 0.0)) throw InvalidArgument("norm and variation must be non-negative");
    const double span = s - t;
    if (span == 0.0 || norm == 0.0 || fvar == 0.0) return 0;
    const double linear = span * norm;
    const double quadratic = span * span * norm * norm * fvar / (2.0 * epsilon);
    const double required = std::ceil(std::max(linear, quadratic));
    if (!(required <= static_cast<double>(cap))) throw StepBudgetExceeded(required, cap);
    return static_cast<std::uint64_t>(required);
}

Gamble euler_step(const LowerEnvelope& env, const Gamble& f, double delta) {
    require_same_space(env.space(), f.space());
    check_step_size(delta, env.norm_bound());
    std::vector<double> g(f.values().begin(), f.values().end()), scratch(g.size());
    iterate(env, g, scratch, delta, 1);
    return Gamble(f.space(), std::move(g));
}

Approximation compute_L(const LowerEnvelope& env, double t, double s, const Gamble& f, double epsilon,
                        std::uint64_t cap) {
    require_same_space(env.space(), f.space());
    const std::uint64_t n = step_count(t, s, env.norm_bound(), variation_norm(f), epsilon, cap);
    if (n == 0) return {f, 0.0, 0};
    const double delta = (s - t) / static_cast<double>(n);
    std::vector<double> g(f.values().begin(), f.values().end()), scratch(g.size());
    iterate(env, g, scratch, delta, n);
    return {Gamble(f.space(), std::move(g)), epsilon, n};
}

Partition::Partition(std::vector<double> grid) {
    if (grid.size() < 2) throw InvalidArgument("a partition needs at least two points");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!std::isfinite(grid[i]) || grid[i] < 0.0) throw InvalidArgument("partition points must be finite and non-negative");
        if (i > 0) {
            const double d = grid[i] - grid[i - 1];
            if (!(d > 0.0)) throw InvalidArgument("partition points must be strictly increasing");
            deltas_.push_back(d);
            mesh_ = std::max(mesh_, d);
        }
    }
    start_ = grid.front();
    end_ = grid.back();
}

Partition Partition::uniform(double t, double s, std::uint64_t n) {
    if (n == 0 || !(t < s)) throw InvalidArgument("uniform partition needs t < s and n >= 1");
    Partition p;
    p.start_ = t;
    p.end_ = s;
    const double delta = (s - t) / static_cast<double>(n);
    p.deltas_.assign(n, delta);
    p.mesh_ = delta;
    return p;
}

Gamble phi_u(const LowerEnvelope& env, const Partition& partition, const Gamble& f) {
    require_same_space(env.space(), f.space());
    check_step_size(partition.mesh(), env.norm_bound());
    std::vector<double> g(f.values().begin(), f.values().end()), scratch(g.size());
    const auto& deltas = partition.deltas();
    for (auto it = deltas.rbegin(); it != deltas.rend(); ++it) iterate(env, g, scratch, *it, 1);
    return Gamble(f.space(), std::move(g));
}

} // namespace ictmc
