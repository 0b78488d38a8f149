#include "ictmc/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace ictmc {

namespace {

void require_finite(std::span<const double> values, const char* what) {
    for (double v : values) {
        if (!std::isfinite(v)) throw InvalidArgument(std::string(what) + " contains a non-finite entry");
    }
}

} // namespace

// ---------------------------------------------------------------------------
// StateSpace

StateSpace::StateSpace(std::vector<std::string> labels) {
    if (labels.empty()) throw InvalidArgument("a state space needs at least one state");
    auto impl = std::make_shared<Impl>();
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i].empty()) throw InvalidArgument("state labels must be non-empty");
        if (!impl->index.emplace(labels[i], i).second) {
            throw InvalidArgument("duplicate state label '" + labels[i] + "'");
        }
    }
    impl->labels = std::move(labels);
    impl_ = std::move(impl);
}

StateSpace StateSpace::numbered(std::size_t n) {
    std::vector<std::string> labels;
    labels.reserve(n);
    for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(i));
    return StateSpace(std::move(labels));
}

std::optional<std::size_t> StateSpace::find(const std::string& label) const {
    auto it = impl_->index.find(label);
    if (it == impl_->index.end()) return std::nullopt;
    return it->second;
}

std::size_t StateSpace::index(const std::string& label) const {
    if (auto i = find(label)) return *i;
    throw InvalidArgument("unknown state '" + label + "'");
}

void require_same_space(const StateSpace& a, const StateSpace& b) {
    if (!(a == b)) throw SpaceMismatch();
}

// ---------------------------------------------------------------------------
// Gamble

Gamble::Gamble(StateSpace space, std::vector<double> values)
    : space_(std::move(space)), values_(std::move(values)) {
    if (values_.size() != space_.size()) throw InvalidArgument("gamble length does not match the state space");
    require_finite(values_, "gamble");
}

Gamble Gamble::constant(const StateSpace& space, double value) {
    return Gamble(space, std::vector<double>(space.size(), value));
}

Gamble Gamble::indicator(const StateSpace& space, std::size_t state) {
    if (state >= space.size()) throw InvalidArgument("indicator state out of range");
    std::vector<double> v(space.size(), 0.0);
    v[state] = 1.0;
    return Gamble(space, std::move(v));
}

double Gamble::min() const { return *std::min_element(values_.begin(), values_.end()); }
double Gamble::max() const { return *std::max_element(values_.begin(), values_.end()); }

Gamble Gamble::operator-() const {
    std::vector<double> v(values_.size());
    std::transform(values_.begin(), values_.end(), v.begin(), [](double x) { return -x; });
    return Gamble(space_, std::move(v));
}

Gamble operator+(const Gamble& a, const Gamble& b) {
    require_same_space(a.space_, b.space_);
    std::vector<double> v(a.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a.values_[i] + b.values_[i];
    return Gamble(a.space_, std::move(v));
}

Gamble operator-(const Gamble& a, const Gamble& b) {
    require_same_space(a.space_, b.space_);
    std::vector<double> v(a.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a.values_[i] - b.values_[i];
    return Gamble(a.space_, std::move(v));
}

Gamble operator+(const Gamble& a, double mu) {
    std::vector<double> v(a.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a.values_[i] + mu;
    return Gamble(a.space_, std::move(v));
}

Gamble operator*(double lambda, const Gamble& a) {
    std::vector<double> v(a.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = lambda * a.values_[i];
    return Gamble(a.space_, std::move(v));
}

double max_norm(const Gamble& f) {
    double m = 0.0;
    for (double v : f.values()) m = std::max(m, std::abs(v));
    return m;
}

double variation_norm(const Gamble& f) { return f.max() - f.min(); }

// ---------------------------------------------------------------------------
// MultiGamble

std::size_t checked_power(std::size_t base, std::size_t exponent) {
    std::size_t result = 1;
    for (std::size_t i = 0; i < exponent; ++i) {
        if (base != 0 && result > std::numeric_limits<std::size_t>::max() / base) {
            throw InvalidArgument("joint state space is too large");
        }
        result *= base;
    }
    return result;
}

namespace {

void require_time_sequence(const std::vector<double>& times) {
    if (times.empty()) throw InvalidArgument("time sequence must be non-empty");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!std::isfinite(times[i]) || times[i] < 0.0) {
            throw InvalidArgument("time points must be finite and non-negative");
        }
        if (i > 0 && !(times[i - 1] < times[i])) {
            throw InvalidArgument("time points must be strictly increasing");
        }
    }
}

} // namespace

MultiGamble::MultiGamble(StateSpace space, std::vector<double> times, std::vector<double> table)
    : space_(std::move(space)), times_(std::move(times)), table_(std::move(table)) {
    require_time_sequence(times_);
    if (table_.size() != checked_power(space_.size(), times_.size())) {
        throw InvalidArgument("table length must equal |X|^(number of time points)");
    }
    require_finite(table_, "multi-time gamble");
}

MultiGamble MultiGamble::from_gamble(const Gamble& f, double time) {
    return MultiGamble(f.space(), {time}, std::vector<double>(f.values().begin(), f.values().end()));
}

std::size_t MultiGamble::encode(std::span<const std::size_t> states) const {
    if (states.size() != times_.size()) throw InvalidArgument("state tuple has the wrong length");
    const std::size_t n = space_.size();
    std::size_t offset = 0;
    for (std::size_t s : states) {
        if (s >= n) throw InvalidArgument("state index out of range");
        offset = offset * n + s;
    }
    return offset;
}

StateTuple MultiGamble::decode(std::size_t offset) const {
    const std::size_t n = space_.size();
    StateTuple states(times_.size());
    for (std::size_t i = states.size(); i-- > 0;) {
        states[i] = offset % n;
        offset /= n;
    }
    return states;
}

std::optional<std::size_t> MultiGamble::time_index(double t) const {
    auto it = std::lower_bound(times_.begin(), times_.end(), t);
    if (it == times_.end() || *it != t) return std::nullopt;
    return static_cast<std::size_t>(it - times_.begin());
}

MultiGamble MultiGamble::restrict(const std::vector<std::pair<double, std::size_t>>& assignment) const {
    std::vector<std::optional<std::size_t>> fixed(times_.size());
    for (const auto& [t, state] : assignment) {
        auto i = time_index(t);
        if (!i) throw InvalidArgument("assignment references a time point the function does not depend on");
        if (state >= space_.size()) throw InvalidArgument("state index out of range");
        if (fixed[*i] && *fixed[*i] != state) throw InvalidArgument("conflicting assignment");
        fixed[*i] = state;
    }
    std::vector<double> free_times;
    for (std::size_t i = 0; i < times_.size(); ++i) {
        if (!fixed[i]) free_times.push_back(times_[i]);
    }
    if (free_times.empty()) throw InvalidArgument("restriction must leave at least one time point free");

    StateTuple full(times_.size());
    return tabulate(space_, std::move(free_times), [&](const StateTuple& rest) {
        std::size_t j = 0;
        for (std::size_t i = 0; i < full.size(); ++i) full[i] = fixed[i] ? *fixed[i] : rest[j++];
        return at(full);
    });
}

MultiGamble MultiGamble::extend(const std::vector<double>& times) const {
    std::vector<std::size_t> position;
    position.reserve(times_.size());
    for (double t : times_) {
        auto it = std::find(times.begin(), times.end(), t);
        if (it == times.end()) throw InvalidArgument("extension must contain every original time point");
        position.push_back(static_cast<std::size_t>(it - times.begin()));
    }
    StateTuple own(times_.size());
    return tabulate(space_, times, [&](const StateTuple& states) {
        for (std::size_t i = 0; i < own.size(); ++i) own[i] = states[position[i]];
        return at(own);
    });
}

Gamble MultiGamble::to_gamble() const {
    if (arity() != 1) throw InvalidArgument("only a single-time function converts to a gamble");
    return Gamble(space_, table_);
}

bool MultiGamble::is_indicator() const {
    return std::all_of(table_.begin(), table_.end(), [](double v) { return v == 0.0 || v == 1.0; });
}

// ---------------------------------------------------------------------------
// SquareMatrix

SquareMatrix::SquareMatrix(StateSpace space, std::vector<double> entries)
    : space_(std::move(space)), entries_(std::move(entries)) {
    if (entries_.size() != space_.size() * space_.size()) {
        throw InvalidArgument("matrix must have |X| x |X| entries");
    }
    require_finite(entries_, "matrix");
}

SquareMatrix::SquareMatrix(StateSpace space, const std::vector<std::vector<double>>& rows)
    : space_(std::move(space)) {
    const std::size_t n = space_.size();
    if (rows.size() != n) throw InvalidArgument("matrix must have |X| rows");
    entries_.reserve(n * n);
    for (const auto& r : rows) {
        if (r.size() != n) throw InvalidArgument("matrix rows must have |X| entries");
        entries_.insert(entries_.end(), r.begin(), r.end());
    }
    require_finite(entries_, "matrix");
}

SquareMatrix SquareMatrix::zero(const StateSpace& space) {
    return SquareMatrix(space, std::vector<double>(space.size() * space.size(), 0.0));
}

SquareMatrix SquareMatrix::identity(const StateSpace& space) {
    const std::size_t n = space.size();
    std::vector<double> e(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) e[i * n + i] = 1.0;
    return SquareMatrix(space, std::move(e));
}

SquareMatrix operator+(const SquareMatrix& a, const SquareMatrix& b) {
    require_same_space(a.space_, b.space_);
    std::vector<double> e(a.entries_.size());
    for (std::size_t i = 0; i < e.size(); ++i) e[i] = a.entries_[i] + b.entries_[i];
    return SquareMatrix(a.space_, std::move(e));
}

SquareMatrix operator-(const SquareMatrix& a, const SquareMatrix& b) {
    require_same_space(a.space_, b.space_);
    std::vector<double> e(a.entries_.size());
    for (std::size_t i = 0; i < e.size(); ++i) e[i] = a.entries_[i] - b.entries_[i];
    return SquareMatrix(a.space_, std::move(e));
}

SquareMatrix operator*(double lambda, const SquareMatrix& a) {
    std::vector<double> e(a.entries_.size());
    for (std::size_t i = 0; i < e.size(); ++i) e[i] = lambda * a.entries_[i];
    return SquareMatrix(a.space_, std::move(e));
}

SquareMatrix operator*(const SquareMatrix& a, const SquareMatrix& b) {
    require_same_space(a.space_, b.space_);
    const std::size_t n = a.size();
    std::vector<double> e(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            const double aik = a.entries_[i * n + k];
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) e[i * n + j] += aik * b.entries_[k * n + j];
        }
    }
    return SquareMatrix(a.space_, std::move(e));
}

double operator_norm(const SquareMatrix& a) {
    double norm = 0.0;
    for (std::size_t x = 0; x < a.size(); ++x) {
        double sum = 0.0;
        for (double v : a.row(x)) sum += std::abs(v);
        norm = std::max(norm, sum);
    }
    return norm;
}

Gamble apply_matrix(const SquareMatrix& a, const Gamble& f) {
    require_same_space(a.space(), f.space());
    std::vector<double> out(a.size());
    for (std::size_t x = 0; x < a.size(); ++x) {
        auto row = a.row(x);
        out[x] = std::inner_product(row.begin(), row.end(), f.values().begin(), 0.0);
    }
    return Gamble(f.space(), std::move(out));
}

// ---------------------------------------------------------------------------
// Rate and transition matrices

ValidationReport check_rate_matrix(const SquareMatrix& m) {
    ValidationReport report;
    const std::size_t n = m.size();
    const double row_tol = kRateRowSumTolerance * static_cast<double>(n);
    for (std::size_t x = 0; x < n; ++x) {
        double sum = 0.0;
        for (std::size_t y = 0; y < n; ++y) {
            sum += m(x, y);
            if (y != x && m(x, y) < -kRateOffDiagonalTolerance) {
                report.violations.push_back({"R2", x, y, m(x, y)});
            }
        }
        if (std::abs(sum) > row_tol) report.violations.push_back({"R1", x, std::nullopt, sum});
    }
    return report;
}

ValidationReport check_transition_matrix(const SquareMatrix& m) {
    ValidationReport report;
    const std::size_t n = m.size();
    const double row_tol = kTransitionRowSumTolerance * static_cast<double>(n);
    for (std::size_t x = 0; x < n; ++x) {
        double sum = 0.0;
        for (std::size_t y = 0; y < n; ++y) {
            const double v = m(x, y);
            sum += v;
            if (v < -kTransitionEntryTolerance) report.violations.push_back({"T2", x, y, v});
            if (v > 1.0 + kTransitionEntryTolerance) report.violations.push_back({"T2", x, y, v - 1.0});
        }
        if (std::abs(sum - 1.0) > row_tol) report.violations.push_back({"T1", x, std::nullopt, sum - 1.0});
    }
    return report;
}

RateMatrix::RateMatrix(const SquareMatrix& m) : matrix_(m) {
    auto report = check_rate_matrix(m);
    if (!report.ok()) throw ValidationError(std::move(report));
    const std::size_t n = m.size();
    std::vector<double> e(m.entries().begin(), m.entries().end());
    for (std::size_t x = 0; x < n; ++x) {
        double off = 0.0;
        for (std::size_t y = 0; y < n; ++y) {
            if (y == x) continue;
            double& v = e[x * n + y];
            if (v < 0.0) v = 0.0;
            off += v;
        }
        e[x * n + x] = -off;
    }
    matrix_ = SquareMatrix(m.space(), std::move(e));
}

double RateMatrix::apply_row(std::size_t x, std::span<const double> f) const {
    const auto row = matrix_.row(x);
    const double fx = f[x];
    double sum = 0.0;
    for (std::size_t y = 0; y < row.size(); ++y) {
        if (y != x) sum += row[y] * (f[y] - fx);
    }
    return sum;
}

Gamble apply_matrix(const RateMatrix& q, const Gamble& f) {
    require_same_space(q.space(), f.space());
    std::vector<double> out(q.size());
    for (std::size_t x = 0; x < out.size(); ++x) out[x] = q.apply_row(x, f.values());
    return Gamble(f.space(), std::move(out));
}

TransitionMatrix::TransitionMatrix(const SquareMatrix& m) : matrix_(m) {
    auto report = check_transition_matrix(m);
    if (!report.ok()) throw ValidationError(std::move(report));
    std::vector<double> e(m.entries().begin(), m.entries().end());
    for (double& v : e) v = std::clamp(v, 0.0, 1.0);
    matrix_ = SquareMatrix(m.space(), std::move(e));
}

Validated<RateMatrix> validate_rate_matrix(const SquareMatrix& m) {
    auto report = check_rate_matrix(m);
    if (!report.ok()) return {std::nullopt, std::move(report)};
    return {RateMatrix(m), {}};
}

Validated<TransitionMatrix> validate_transition_matrix(const SquareMatrix& m) {
    auto report = check_transition_matrix(m);
    if (!report.ok()) return {std::nullopt, std::move(report)};
    return {TransitionMatrix(m), {}};
}

} // namespace ictmc
