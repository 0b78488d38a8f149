#include "ictmc/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ictmc {

namespace {

std::vector<double> checked_pmf(const StateSpace& space, std::vector<double> pmf) {
    if (pmf.size() != space.size()) throw InvalidArgument("pmf length does not match the state space");
    double sum = 0.0;
    for (double p : pmf) {
        if (!std::isfinite(p) || p < 0.0) throw InvalidArgument("pmf entries must be finite and non-negative");
        sum += p;
    }
    if (std::abs(sum - 1.0) > kPmfSumTolerance) throw InvalidArgument("pmf entries must sum to 1");
    return pmf;
}

// Removes the last time point of f: for every history x over the remaining
// times, g(x) = [L_{t_prev}^{t_last} f(x, ·)](x_prev).
MultiGamble reduce_last(const LowerEnvelope& env, const MultiGamble& f, double epsilon, std::uint64_t cap,
                        std::uint64_t& steps) {
    const auto& times = f.times();
    const std::size_t k = times.size();
    const std::size_t n = f.space().size();
    const double t = times[k - 2];
    const double s = times[k - 1];
    const auto table = f.table();
    std::vector<double> prefix_times(times.begin(), times.end() - 1);

    const std::size_t histories = table.size() / n;
    std::vector<double> reduced(histories);
    for (std::size_t h = 0; h < histories; ++h) {
        Gamble slice(f.space(), std::vector<double>(table.begin() + h * n, table.begin() + (h + 1) * n));
        auto approx = compute_L(env, t, s, slice, epsilon, cap);
        steps += approx.steps;
        // Mixed radix: the latest remaining time is the innermost digit.
        reduced[h] = approx.value[h % n];
    }
    return MultiGamble(f.space(), std::move(prefix_times), std::move(reduced));
}

ScalarValue negated(ScalarValue v) {
    v.value = -v.value;
    return v;
}

HistoryValues negated(HistoryValues v) {
    v.values = negate(v.values);
    return v;
}

void require_indicator(const MultiGamble& f) {
    if (!f.is_indicator()) throw InvalidArgument("an event must be given by a 0/1 indicator table");
}

} // namespace

InitialSet InitialSet::vacuous(const StateSpace& space) { return InitialSet(Kind::vacuous, space); }

InitialSet InitialSet::singleton(const StateSpace& space, std::vector<double> pmf) {
    InitialSet set(Kind::singleton, space);
    set.pmfs_.push_back(checked_pmf(space, std::move(pmf)));
    return set;
}

InitialSet InitialSet::finite(const StateSpace& space, std::vector<std::vector<double>> pmfs) {
    if (pmfs.empty()) throw InvalidArgument("a finite initial set needs at least one pmf");
    InitialSet set(Kind::finite, space);
    for (auto& p : pmfs) set.pmfs_.push_back(checked_pmf(space, std::move(p)));
    return set;
}

double lower_exp_initial(const InitialSet& initial, const Gamble& f) {
    require_same_space(initial.space(), f.space());
    if (initial.kind() == InitialSet::Kind::vacuous) return f.min();
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : initial.pmfs()) {
        double e = 0.0;
        for (std::size_t x = 0; x < p.size(); ++x) e += p[x] * f[x];
        best = std::min(best, e);
    }
    return best;
}

HistoryValues conditional_single_future(const LowerEnvelope& env, const MultiGamble& f, double epsilon,
                                        std::uint64_t cap) {
    require_same_space(env.space(), f.space());
    if (f.arity() < 2) throw InvalidArgument("need at least one conditioning time before the future time");
    std::uint64_t steps = 0;
    auto values = reduce_last(env, f, epsilon, cap, steps);
    return {std::move(values), epsilon, steps};
}

std::vector<double> ConditionalQuery::future_times() const {
    const auto& all = target.times();
    return std::vector<double>(all.begin() + static_cast<std::ptrdiff_t>(std::min(condition_times.size(), all.size())),
                               all.end());
}

void ConditionalQuery::validate() const {
    if (!std::isfinite(epsilon) || !(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
    const auto& all = target.times();
    if (condition_times.size() >= all.size()) throw InvalidArgument("a conditional query needs at least one future time");
    for (std::size_t i = 0; i < condition_times.size(); ++i) {
        if (all[i] != condition_times[i]) {
            throw InvalidArgument("target times must be the conditioning times followed by the future times");
        }
    }
}

HistoryValues conditional_multi_future(const LowerEnvelope& env, const ConditionalQuery& query, std::uint64_t cap) {
    require_same_space(env.space(), query.target.space());
    query.validate();
    const std::size_t future = query.target.arity() - query.condition_times.size();
    const std::size_t keep = query.condition_times.empty() ? 1 : query.condition_times.size();
    const std::size_t stages = query.target.arity() - keep;
    if (stages == 0) return {query.target, 0.0, 0};
    // With u non-empty there are |v| = m+1 stages, each with budget ε/(m+1).
    const double per_stage = query.epsilon / static_cast<double>(query.condition_times.empty() ? stages : future);

    std::uint64_t steps = 0;
    MultiGamble g = query.target;
    while (g.arity() > keep) g = reduce_last(env, g, per_stage, cap, steps);
    return {std::move(g), query.epsilon, steps};
}

ScalarValue conditional_value(const LowerEnvelope& env, const ConditionalQuery& query,
                              std::span<const std::size_t> history, std::uint64_t cap) {
    query.validate();
    const auto& u = query.condition_times;
    if (u.empty()) throw InvalidArgument("conditioning on a history needs conditioning times");
    if (history.size() != u.size()) throw InvalidArgument("history length must match the conditioning times");
    std::vector<std::pair<double, std::size_t>> assignment;
    for (std::size_t i = 0; i + 1 < u.size(); ++i) assignment.emplace_back(u[i], history[i]);

    ConditionalQuery reduced{{u.back()}, assignment.empty() ? query.target : query.target.restrict(assignment),
                             query.epsilon};
    auto result = conditional_multi_future(env, reduced, cap);
    const std::size_t last = history.back();
    return {result.values.at(std::span<const std::size_t>(&last, 1)), result.error_bound, result.steps};
}

ScalarValue unconditional(const LowerEnvelope& env, const UnconditionalQuery& query, std::uint64_t cap) {
    require_same_space(env.space(), query.target.space());
    require_same_space(query.initial.space(), query.target.space());
    if (!std::isfinite(query.epsilon) || !(query.epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");

    MultiGamble target = query.target;
    if (target.times().front() != 0.0) {
        std::vector<double> times{0.0};
        times.insert(times.end(), target.times().begin(), target.times().end());
        target = target.extend(times);
    }
    if (target.arity() == 1) return {lower_exp_initial(query.initial, target.to_gamble()), 0.0, 0};

    auto h = conditional_multi_future(env, ConditionalQuery{{0.0}, std::move(target), query.epsilon}, cap);
    return {lower_exp_initial(query.initial, h.values.to_gamble()), h.error_bound, h.steps};
}

MultiGamble negate(const MultiGamble& f) {
    std::vector<double> table(f.table().begin(), f.table().end());
    for (double& v : table) v = -v;
    return MultiGamble(f.space(), f.times(), std::move(table));
}

HistoryValues upper_conditional(const LowerEnvelope& env, const ConditionalQuery& query, std::uint64_t cap) {
    ConditionalQuery flipped{query.condition_times, negate(query.target), query.epsilon};
    return negated(conditional_multi_future(env, flipped, cap));
}

ScalarValue upper_conditional_value(const LowerEnvelope& env, const ConditionalQuery& query,
                                    std::span<const std::size_t> history, std::uint64_t cap) {
    ConditionalQuery flipped{query.condition_times, negate(query.target), query.epsilon};
    return negated(conditional_value(env, flipped, history, cap));
}

ScalarValue upper_unconditional(const LowerEnvelope& env, const UnconditionalQuery& query, std::uint64_t cap) {
    UnconditionalQuery flipped{query.initial, negate(query.target), query.epsilon};
    return negated(unconditional(env, flipped, cap));
}

HistoryValues lower_probability(const LowerEnvelope& env, const ConditionalQuery& query, std::uint64_t cap) {
    require_indicator(query.target);
    return conditional_multi_future(env, query, cap);
}

HistoryValues upper_probability(const LowerEnvelope& env, const ConditionalQuery& query, std::uint64_t cap) {
    require_indicator(query.target);
    return upper_conditional(env, query, cap);
}

ScalarValue lower_probability(const LowerEnvelope& env, const UnconditionalQuery& query, std::uint64_t cap) {
    require_indicator(query.target);
    return unconditional(env, query, cap);
}

ScalarValue upper_probability(const LowerEnvelope& env, const UnconditionalQuery& query, std::uint64_t cap) {
    require_indicator(query.target);
    return upper_unconditional(env, query, cap);
}

} // namespace ictmc
