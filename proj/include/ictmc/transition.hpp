#pragma once

// The lower transition operator L_t^s, approximated by products of Euler
// factors (I + ΔQ̲) over a partition of [t, s].

#include "ictmc/envelope.hpp"

#include <cstdint>
#include <vector>

namespace ictmc {

inline constexpr std::uint64_t kDefaultStepCap = 1'000'000'000;

/// Number of uniform Euler steps that guarantees an error of at most epsilon:
///   n = ceil(max{(s-t)·norm, (s-t)²·norm²·fvar / (2ε)}),
/// and n = 0 when the interval is empty, norm is zero or f is constant.
/// Throws StepBudgetExceeded when n would exceed cap.
std::uint64_t step_count(double t, double s, double norm, double fvar, double epsilon,
                         std::uint64_t cap = kDefaultStepCap);

/// f + Δ·Q̲f. Throws StepSizeError unless 0 <= Δ·norm_bound <= 1.
Gamble euler_step(const LowerEnvelope& env, const Gamble& f, double delta);

struct Approximation {
    Gamble value;
    double error_bound = 0.0; // guaranteed ‖value - L_t^s f‖ bound
    std::uint64_t steps = 0;
};

struct OperatorQuery {
    double t = 0.0;
    double s = 0.0;
    double epsilon = 0.0;

    /// Throws InvalidArgument on t > s, negative or non-finite times, or ε <= 0.
    void validate() const;
};

/// L_t^s f within epsilon, by n = step_count(...) uniform Euler steps.
Approximation compute_L(const LowerEnvelope& env, double t, double s, const Gamble& f, double epsilon,
                        std::uint64_t cap = kDefaultStepCap);

/// A partition t = t_0 < ... < t_n = s, stored as its step lengths.
class Partition {
public:
    explicit Partition(std::vector<double> grid);
    static Partition uniform(double t, double s, std::uint64_t n);

    double start() const { return start_; }
    double end() const { return end_; }
    const std::vector<double>& deltas() const { return deltas_; }
    double mesh() const { return mesh_; }

private:
    Partition() = default;

    double start_ = 0.0;
    double end_ = 0.0;
    std::vector<double> deltas_;
    double mesh_ = 0.0;
};

/// Φ_u f = (I + Δ_1 Q̲)···(I + Δ_n Q̲) f, latest factor applied first.
/// Throws StepSizeError when mesh·norm_bound > 1.
Gamble phi_u(const LowerEnvelope& env, const Partition& partition, const Gamble& f);

} // namespace ictmc
