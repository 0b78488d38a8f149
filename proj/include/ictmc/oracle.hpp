#pragma once

// Reference computations on precise chains, used to cross-check the
// imprecise operators: matrix exponentials, piecewise-constant chains and
// Markov schemes that pick one rate matrix from the set per time step.

#include "ictmc/envelope.hpp"

#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace ictmc {

/// Poisson tail mass at which the uniformization series is truncated.
inline constexpr double kUniformizationTail = 1e-13;

/// e^{QΔ} by uniformization: with λ = max|Q(x,x)| + 1 and P = I + Q/λ,
/// e^{QΔ} = Σ_k e^{-λΔ} (λΔ)^k / k! P^k. Long horizons are split into chunks
/// with λΔ <= 30 and recombined by repeated squaring.
TransitionMatrix matrix_exponential(const RateMatrix& q, double delta);

/// Q_j is active on [b_j, b_{j+1}); the last piece extends to infinity.
class PiecewiseSystem {
public:
    PiecewiseSystem(std::vector<double> breakpoints, std::vector<RateMatrix> rates);

    const std::vector<double>& breakpoints() const { return breakpoints_; }
    const std::vector<RateMatrix>& rates() const { return rates_; }

private:
    std::vector<double> breakpoints_;
    std::vector<RateMatrix> rates_;
};

/// T_t^s f for the piecewise-homogeneous chain, latest piece applied first.
Gamble piecewise_expectation(const PiecewiseSystem& system, double t, double s, const Gamble& f);

/// Backward greedy scheme: over n uniform steps, g <- e^{Q_i Δ} g with Q_i the
/// achieving member for the current g. Approximates L_t^s f from above.
Gamble greedy_markov_scheme(const LowerEnvelope& env, double t, double s, std::size_t n, const Gamble& f);

inline constexpr std::size_t kExhaustiveBudget = 1'000'000;

/// Componentwise minimum over every choice of one vertex per uniform step.
/// Throws InvalidArgument when |vertices|^n exceeds kExhaustiveBudget.
Gamble exhaustive_markov_min(std::span<const RateMatrix> vertices, double t, double s, std::size_t n,
                             const Gamble& f);

/// E[f(X_t) | X_0 = a] for the ternary chain with rates a->b = λ, b->c = 0.01
/// and f = (1, 0, 2). λ must lie in [0.01, 0.5].
double example8_closed_form(double lambda, double t);

/// Minimum of example8_closed_form over the grid.
double whm_grid_search(std::span<const double> lambda_grid, double t);

/// m equally spaced points from lo to hi inclusive.
std::vector<double> uniform_grid(double lo, double hi, std::size_t m);

/// The (row, column) of the only off-diagonal entry with lower < upper, when
/// an interval spec has exactly one such entry.
std::optional<std::pair<std::size_t, std::size_t>> single_free_entry(const RateSetSpec& spec);

/// min over λ on an m-point grid of [e^{Q(λ) t} f](state), where Q(λ) fixes
/// every rate at its bound except the single free entry, set to λ.
double single_parameter_whm(const RateSetSpec& spec, std::size_t state, const Gamble& f, double t,
                            std::size_t points);

} // namespace ictmc
