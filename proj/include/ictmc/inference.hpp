#pragma once

// Lower and upper expectations of functions of finitely many time points.
//
// Conditional queries compose lower transition operators backwards over the
// future time points, L_{t_n}^{s_0} L_{s_0}^{s_1} ··· L_{s_{m-1}}^{s_m} f, each
// factor evaluated per history with a budget of ε/(m+1). The composition is
// the lower expectation over all well-behaved processes consistent with a
// convex rate set with separately specified rows.

#include "ictmc/transition.hpp"

#include <optional>
#include <span>
#include <vector>

namespace ictmc {

/// The set M of initial distributions.
class InitialSet {
public:
    enum class Kind { vacuous, singleton, finite };

    static InitialSet vacuous(const StateSpace& space);
    static InitialSet singleton(const StateSpace& space, std::vector<double> pmf);
    static InitialSet finite(const StateSpace& space, std::vector<std::vector<double>> pmfs);

    Kind kind() const { return kind_; }
    const StateSpace& space() const { return space_; }
    const std::vector<std::vector<double>>& pmfs() const { return pmfs_; }

    friend bool operator==(const InitialSet&, const InitialSet&) = default;

private:
    InitialSet(Kind kind, StateSpace space) : kind_(kind), space_(std::move(space)) {}

    Kind kind_;
    StateSpace space_;
    std::vector<std::vector<double>> pmfs_;
};

inline constexpr double kPmfSumTolerance = 1e-10;

/// E̲_M[f] = inf over p in M of Σ p(x) f(x).
double lower_exp_initial(const InitialSet& initial, const Gamble& f);

/// Values per history together with a guaranteed error bound.
struct HistoryValues {
    MultiGamble values;      // over the conditioning times
    double error_bound = 0.0;
    std::uint64_t steps = 0; // total Euler steps spent
};

struct ScalarValue {
    double value = 0.0;
    double error_bound = 0.0;
    std::uint64_t steps = 0;
};

/// [L_{t_n}^s f](x_u) for every history x_u, where f is over u ∪ {s}.
HistoryValues conditional_single_future(const LowerEnvelope& env, const MultiGamble& f, double epsilon,
                                        std::uint64_t cap = kDefaultStepCap);

struct ConditionalQuery {
    std::vector<double> condition_times; // u, may be empty
    MultiGamble target;                  // over u ∪ v, v non-empty and after u
    double epsilon = 0.0;                // total budget

    std::vector<double> future_times() const;
    /// Throws InvalidArgument when the query invariants fail.
    void validate() const;
};

/// Backward recursion over v. With empty u the result is a function of
/// X_{s_0}, before the final transition to the conditioning time.
HistoryValues conditional_multi_future(const LowerEnvelope& env, const ConditionalQuery& query,
                                       std::uint64_t cap = kDefaultStepCap);

/// The lower expectation for one history x_u (u must be non-empty). Fixes the
/// history before recursing, so only the last conditioning time stays free.
ScalarValue conditional_value(const LowerEnvelope& env, const ConditionalQuery& query,
                              std::span<const std::size_t> history, std::uint64_t cap = kDefaultStepCap);

struct UnconditionalQuery {
    InitialSet initial;
    MultiGamble target; // over u; trivially extended to time 0 when 0 is missing
    double epsilon = 0.0;
};

ScalarValue unconditional(const LowerEnvelope& env, const UnconditionalQuery& query,
                          std::uint64_t cap = kDefaultStepCap);

// Upper counterparts via Ē[f] = -E̲[-f]; the bound is unchanged.
HistoryValues upper_conditional(const LowerEnvelope& env, const ConditionalQuery& query,
                                std::uint64_t cap = kDefaultStepCap);
ScalarValue upper_conditional_value(const LowerEnvelope& env, const ConditionalQuery& query,
                                    std::span<const std::size_t> history, std::uint64_t cap = kDefaultStepCap);
ScalarValue upper_unconditional(const LowerEnvelope& env, const UnconditionalQuery& query,
                                std::uint64_t cap = kDefaultStepCap);

/// Lower/upper probabilities. The target must be an indicator (0/1 table);
/// otherwise InvalidArgument is thrown.
HistoryValues lower_probability(const LowerEnvelope& env, const ConditionalQuery& query,
                                std::uint64_t cap = kDefaultStepCap);
HistoryValues upper_probability(const LowerEnvelope& env, const ConditionalQuery& query,
                                std::uint64_t cap = kDefaultStepCap);
ScalarValue lower_probability(const LowerEnvelope& env, const UnconditionalQuery& query,
                              std::uint64_t cap = kDefaultStepCap);
ScalarValue upper_probability(const LowerEnvelope& env, const UnconditionalQuery& query,
                              std::uint64_t cap = kDefaultStepCap);

MultiGamble negate(const MultiGamble& f);

} // namespace ictmc
