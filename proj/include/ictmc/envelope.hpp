#pragma once

// Sets of rate matrices and their lower envelope Q̲, the lower transition
// rate operator [Q̲f](x) = inf { [Qf](x) : Q in the set }.

#include "ictmc/core.hpp"

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace ictmc {

/// Declarative description of a non-empty bounded set of rate matrices.
///
/// interval: every off-diagonal rate Q(x,y) ranges independently over
///           [lower(x,y), upper(x,y)]; diagonals follow from the zero row sum.
/// finite:   an explicit list of member rate matrices. Its envelope equals
///           the envelope of the convex hull with separately specified rows.
class RateSetSpec {
public:
    enum class Kind { interval, finite };

    /// Throws ValidationError unless 0 <= lower <= upper off the diagonal.
    static RateSetSpec interval(const SquareMatrix& lower, const SquareMatrix& upper);
    static RateSetSpec finite(std::vector<RateMatrix> members, bool separately_specified = false);

    Kind kind() const { return kind_; }
    const StateSpace& space() const { return space_; }

    // interval kind only
    const SquareMatrix& lower_bounds() const;
    const SquareMatrix& upper_bounds() const;

    // finite kind only
    const std::vector<RateMatrix>& members() const { return members_; }
    bool separately_specified() const { return separately_specified_; }

    friend bool operator==(const RateSetSpec&, const RateSetSpec&) = default;

private:
    RateSetSpec(Kind kind, StateSpace space) : kind_(kind), space_(std::move(space)) {}

    Kind kind_;
    StateSpace space_;
    std::vector<SquareMatrix> bounds_; // {lower, upper} for interval kind
    std::vector<RateMatrix> members_;
    bool separately_specified_ = false;
};

/// Off-diagonal bound check for an interval specification ("bounds" rule).
ValidationReport check_interval_bounds(const SquareMatrix& lower, const SquareMatrix& upper);

class LowerEnvelope {
public:
    explicit LowerEnvelope(RateSetSpec spec);

    const RateSetSpec& spec() const { return spec_; }
    const StateSpace& space() const { return spec_.space(); }
    std::size_t size() const { return spec_.space().size(); }

    /// 2 max_x |[Q̲ 1_x](x)|, an upper bound on the operator norm of Q̲.
    double norm_bound() const { return norm_bound_; }

    Gamble lower_apply(const Gamble& f) const;
    Gamble upper_apply(const Gamble& f) const;

    /// Allocation-free kernel: out = Q̲ f. out must not alias f.
    void lower_apply_into(std::span<const double> f, std::span<double> out) const;

    /// A rate matrix assembled from per-row minimisers, so that Q f == Q̲ f.
    RateMatrix achieving_member(const Gamble& f) const;

private:
    double interval_row(std::size_t x, std::span<const double> f) const;
    std::size_t finite_argmin(std::size_t x, std::span<const double> f, double& value) const;

    RateSetSpec spec_;
    std::vector<double> rates_; // lower then upper bounds, or the members, row-major
    double norm_bound_ = 0.0;
};

inline Gamble lower_apply(const LowerEnvelope& env, const Gamble& f) { return env.lower_apply(f); }
inline Gamble upper_apply(const LowerEnvelope& env, const Gamble& f) { return env.upper_apply(f); }
inline double norm_bound(const LowerEnvelope& env) { return env.norm_bound(); }
inline RateMatrix achieving_member(const LowerEnvelope& env, const Gamble& f) { return env.achieving_member(f); }

// ---------------------------------------------------------------------------
// Property checks

using GambleOperator = std::function<Gamble(const Gamble&)>;

struct AxiomProbes {
    std::vector<std::pair<Gamble, Gamble>> pairs;
    std::vector<double> scalars;
};

struct AxiomResult {
    std::string axiom;
    bool passed = true;
    double worst_residual = 0.0;
};

struct AxiomReport {
    AxiomResult lr1{"LR1"}, lr2{"LR2"}, lr3{"LR3"}, lr4{"LR4"};

    bool all_passed() const { return lr1.passed && lr2.passed && lr3.passed && lr4.passed; }
    double worst_residual() const;
};

inline constexpr double kAxiomTolerance = 1e-9;

/// Checks LR1-LR4 on the given probes. Works on any operator so that broken
/// fixtures can be fed through it. Throws InvalidArgument when probes are empty.
AxiomReport check_lower_rate_axioms(const GambleOperator& op, const StateSpace& space, const AxiomProbes& probes);
AxiomReport check_lower_rate_axioms(const LowerEnvelope& env, const AxiomProbes& probes);

struct DominanceReport {
    bool violated = false;
    std::size_t probe = 0; // first violating probe
    std::size_t state = 0;
    double worst_gap = 0.0; // min over probes/states of [Qf](x) - [Q̲f](x)
};

/// Searches for f with Qf < Q̲f - 1e-9. A violation certifies that Q does not
/// dominate Q̲; finding none proves nothing.
DominanceReport dominance_falsifier(const RateMatrix& q, const LowerEnvelope& env, std::span<const Gamble> probes);

} // namespace ictmc
