#pragma once

// Finite state spaces, gambles and the square matrices acting on them.
//
// All types are immutable after construction. A StateSpace shares its label
// table, so copying spaces, gambles and matrices around is cheap.

#include "ictmc/errors.hpp"

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace ictmc {

// Validation tolerances. They are only applied when a SquareMatrix is promoted
// to a RateMatrix or TransitionMatrix; arithmetic elsewhere never clamps.
inline constexpr double kRateRowSumTolerance = 1e-12;       // times |X|
inline constexpr double kRateOffDiagonalTolerance = 1e-12;
inline constexpr double kTransitionRowSumTolerance = 1e-10; // times |X|
inline constexpr double kTransitionEntryTolerance = 1e-12;

class StateSpace {
public:
    explicit StateSpace(std::vector<std::string> labels);

    /// Space with labels "0", "1", ..., "n-1".
    static StateSpace numbered(std::size_t n);

    std::size_t size() const { return impl_->labels.size(); }
    const std::string& label(std::size_t i) const { return impl_->labels.at(i); }
    const std::vector<std::string>& labels() const { return impl_->labels; }

    std::optional<std::size_t> find(const std::string& label) const;
    /// Throws InvalidArgument for unknown labels.
    std::size_t index(const std::string& label) const;

    friend bool operator==(const StateSpace& a, const StateSpace& b) {
        return a.impl_ == b.impl_ || a.impl_->labels == b.impl_->labels;
    }

private:
    struct Impl {
        std::vector<std::string> labels;
        std::unordered_map<std::string, std::size_t> index;
    };
    std::shared_ptr<const Impl> impl_;
};

void require_same_space(const StateSpace& a, const StateSpace& b);

/// A real-valued function on the state space.
class Gamble {
public:
    Gamble(StateSpace space, std::vector<double> values);

    static Gamble constant(const StateSpace& space, double value);
    static Gamble indicator(const StateSpace& space, std::size_t state);

    const StateSpace& space() const { return space_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    std::span<const double> values() const { return values_; }

    double min() const;
    double max() const;

    Gamble operator-() const;
    friend Gamble operator+(const Gamble& a, const Gamble& b);
    friend Gamble operator-(const Gamble& a, const Gamble& b);
    friend Gamble operator+(const Gamble& a, double mu);
    friend Gamble operator*(double lambda, const Gamble& a);

    friend bool operator==(const Gamble& a, const Gamble& b) {
        return a.space_ == b.space_ && a.values_ == b.values_;
    }

private:
    StateSpace space_;
    std::vector<double> values_;
};

double max_norm(const Gamble& f);
double variation_norm(const Gamble& f);

/// State tuple at a set of time points, one state index per time point.
using StateTuple = std::vector<std::size_t>;

/// A real-valued function on tuples of states at finitely many time points.
///
/// The table is dense and row-major over state indices with the first time
/// point outermost, i.e. a tuple (x_0, ..., x_{k-1}) lives at the mixed-radix
/// offset sum_i x_i * |X|^(k-1-i).
class MultiGamble {
public:
    MultiGamble(StateSpace space, std::vector<double> times, std::vector<double> table);

    /// Builds the table by evaluating fn on every tuple in mixed-radix order.
    template <class Fn>
    static MultiGamble tabulate(const StateSpace& space, std::vector<double> times, Fn&& fn);

    /// A gamble on one time point viewed as a one-time MultiGamble.
    static MultiGamble from_gamble(const Gamble& f, double time);

    const StateSpace& space() const { return space_; }
    const std::vector<double>& times() const { return times_; }
    std::size_t arity() const { return times_.size(); }
    std::span<const double> table() const { return table_; }

    std::size_t encode(std::span<const std::size_t> states) const;
    StateTuple decode(std::size_t offset) const;
    double at(std::span<const std::size_t> states) const { return table_[encode(states)]; }

    /// Position of a time point in times(), if present.
    std::optional<std::size_t> time_index(double t) const;

    /// Fixes the states at the given time points. At least one time point
    /// must stay free; the result is over the remaining times in order.
    MultiGamble restrict(const std::vector<std::pair<double, std::size_t>>& assignment) const;

    /// Trivially extends the function to a superset of time points.
    MultiGamble extend(const std::vector<double>& times) const;

    /// Only valid when arity() == 1.
    Gamble to_gamble() const;

    bool is_indicator() const;

    friend bool operator==(const MultiGamble& a, const MultiGamble& b) {
        return a.space_ == b.space_ && a.times_ == b.times_ && a.table_ == b.table_;
    }

private:
    StateSpace space_;
    std::vector<double> times_;
    std::vector<double> table_;
};

std::size_t checked_power(std::size_t base, std::size_t exponent);

template <class Fn>
MultiGamble MultiGamble::tabulate(const StateSpace& space, std::vector<double> times, Fn&& fn) {
    const std::size_t n = space.size();
    const std::size_t k = times.size();
    const std::size_t total = checked_power(n, k);
    std::vector<double> table(total);
    StateTuple states(k, 0);
    for (std::size_t offset = 0; offset < total; ++offset) {
        table[offset] = fn(std::as_const(states));
        for (std::size_t i = k; i-- > 0;) {
            if (++states[i] < n) break;
            states[i] = 0;
        }
    }
    return MultiGamble(space, std::move(times), std::move(table));
}

/// Dense |X| x |X| matrix, row-major.
class SquareMatrix {
public:
    SquareMatrix(StateSpace space, std::vector<double> entries);
    SquareMatrix(StateSpace space, const std::vector<std::vector<double>>& rows);

    static SquareMatrix zero(const StateSpace& space);
    static SquareMatrix identity(const StateSpace& space);

    const StateSpace& space() const { return space_; }
    std::size_t size() const { return space_.size(); }
    double operator()(std::size_t x, std::size_t y) const { return entries_[x * size() + y]; }
    std::span<const double> row(std::size_t x) const {
        return std::span<const double>(entries_).subspan(x * size(), size());
    }
    std::span<const double> entries() const { return entries_; }

    friend SquareMatrix operator+(const SquareMatrix& a, const SquareMatrix& b);
    friend SquareMatrix operator-(const SquareMatrix& a, const SquareMatrix& b);
    friend SquareMatrix operator*(double lambda, const SquareMatrix& a);
    friend SquareMatrix operator*(const SquareMatrix& a, const SquareMatrix& b);

    friend bool operator==(const SquareMatrix& a, const SquareMatrix& b) {
        return a.space_ == b.space_ && a.entries_ == b.entries_;
    }

private:
    StateSpace space_;
    std::vector<double> entries_;
};

double operator_norm(const SquareMatrix& a);
Gamble apply_matrix(const SquareMatrix& a, const Gamble& f);

/// A square matrix with zero row sums and non-negative off-diagonal entries.
///
/// On construction off-diagonal entries within tolerance below zero are
/// clamped to zero and each diagonal entry is re-derived as minus the sum of
/// its row's off-diagonal entries.
class RateMatrix {
public:
    /// Throws ValidationError when R1 or R2 fails.
    explicit RateMatrix(const SquareMatrix& m);

    const SquareMatrix& matrix() const { return matrix_; }
    const StateSpace& space() const { return matrix_.space(); }
    std::size_t size() const { return matrix_.size(); }
    double operator()(std::size_t x, std::size_t y) const { return matrix_(x, y); }

    /// [Qf](x) for one row, evaluated as sum_{y != x} Q(x,y) (f(y) - f(x)).
    double apply_row(std::size_t x, std::span<const double> f) const;

    friend bool operator==(const RateMatrix& a, const RateMatrix& b) { return a.matrix_ == b.matrix_; }

private:
    SquareMatrix matrix_;
};

/// A row-stochastic matrix. Entries within tolerance of [0,1] are clamped.
class TransitionMatrix {
public:
    /// Throws ValidationError when T1 or T2 fails.
    explicit TransitionMatrix(const SquareMatrix& m);

    const SquareMatrix& matrix() const { return matrix_; }
    const StateSpace& space() const { return matrix_.space(); }
    std::size_t size() const { return matrix_.size(); }
    double operator()(std::size_t x, std::size_t y) const { return matrix_(x, y); }

    friend bool operator==(const TransitionMatrix& a, const TransitionMatrix& b) {
        return a.matrix_ == b.matrix_;
    }

private:
    SquareMatrix matrix_;
};

/// Rate-matrix application in difference form; constants map to exactly zero.
Gamble apply_matrix(const RateMatrix& q, const Gamble& f);

template <class T>
struct Validated {
    std::optional<T> value;
    ValidationReport report;

    explicit operator bool() const { return value.has_value(); }
};

ValidationReport check_rate_matrix(const SquareMatrix& m);
ValidationReport check_transition_matrix(const SquareMatrix& m);

Validated<RateMatrix> validate_rate_matrix(const SquareMatrix& m);
Validated<TransitionMatrix> validate_transition_matrix(const SquareMatrix& m);

} // namespace ictmc
