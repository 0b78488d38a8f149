#include "ictmc/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ictmc {

ValidationReport check_interval_bounds(const SquareMatrix& lower, const SquareMatrix& upper) {
    require_same_space(lower.space(), upper.space());
    ValidationReport report;
    const std::size_t n = lower.size();
    for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y = 0; y < n; ++y) {
            if (x == y) continue;
            if (lower(x, y) < 0.0) report.violations.push_back({"bounds", x, y, lower(x, y)});
            if (lower(x, y) > upper(x, y)) {
                report.violations.push_back({"bounds", x, y, lower(x, y) - upper(x, y)});
            }
        }
    }
    return report;
}

RateSetSpec RateSetSpec::interval(const SquareMatrix& lower, const SquareMatrix& upper) {
    auto report = check_interval_bounds(lower, upper);
    if (!report.ok()) throw ValidationError(std::move(report));
    // Diagonals are ignored; zero them so that equality means equal sets.
    auto strip = [](const SquareMatrix& m) {
        std::vector<double> e(m.entries().begin(), m.entries().end());
        for (std::size_t x = 0; x < m.size(); ++x) e[x * m.size() + x] = 0.0;
        return SquareMatrix(m.space(), std::move(e));
    };
    RateSetSpec spec(Kind::interval, lower.space());
    spec.bounds_ = {strip(lower), strip(upper)};
    return spec;
}

RateSetSpec RateSetSpec::finite(std::vector<RateMatrix> members, bool separately_specified) {
    if (members.empty()) throw InvalidArgument("a finite rate set needs at least one member");
    for (const auto& m : members) require_same_space(members.front().space(), m.space());
    RateSetSpec spec(Kind::finite, members.front().space());
    spec.members_ = std::move(members);
    spec.separately_specified_ = separately_specified;
    return spec;
}

const SquareMatrix& RateSetSpec::lower_bounds() const {
    if (kind_ != Kind::interval) throw InvalidArgument("not an interval rate set");
    return bounds_[0];
}

const SquareMatrix& RateSetSpec::upper_bounds() const {
    if (kind_ != Kind::interval) throw InvalidArgument("not an interval rate set");
    return bounds_[1];
}

// ---------------------------------------------------------------------------

LowerEnvelope::LowerEnvelope(RateSetSpec spec) : spec_(std::move(spec)) {
    const std::size_t n = size();
    auto append = [&](const SquareMatrix& m) { rates_.insert(rates_.end(), m.entries().begin(), m.entries().end()); };
    if (spec_.kind() == RateSetSpec::Kind::interval) {
        append(spec_.lower_bounds());
        append(spec_.upper_bounds());
    } else {
        for (const auto& m : spec_.members()) append(m.matrix());
    }
    std::vector<double> indicator(n, 0.0), out(n);
    for (std::size_t x = 0; x < n; ++x) {
        indicator[x] = 1.0;
        lower_apply_into(indicator, out);
        indicator[x] = 0.0;
        norm_bound_ = std::max(norm_bound_, 2.0 * std::abs(out[x]));
    }
}

double LowerEnvelope::interval_row(std::size_t x, std::span<const double> f) const {
    const std::size_t n = f.size();
    const double* lo = rates_.data() + x * n;
    const double* hi = lo + n * n;
    const double fx = f[x];
    double sum = 0.0;
    for (std::size_t y = 0; y < f.size(); ++y) {
        if (y == x) continue;
        const double d = f[y] - fx;
        // Ties pick the lower bound; the term is zero either way.
        sum += (d >= 0.0 ? lo[y] : hi[y]) * d;
    }
    return sum;
}

std::size_t LowerEnvelope::finite_argmin(std::size_t x, std::span<const double> f, double& value) const {
    const std::size_t n = f.size();
    const std::size_t count = spec_.members().size();
    const double fx = f[x];
    // Same summation order as RateMatrix::apply_row.
    auto row = [&](std::size_t k) {
        const double* q = rates_.data() + (k * n + x) * n;
        double sum = 0.0;
        for (std::size_t y = 0; y < n; ++y) {
            if (y != x) sum += q[y] * (f[y] - fx);
        }
        return sum;
    };
    std::size_t best = 0;
    value = row(0);
    for (std::size_t k = 1; k < count; ++k) {
        const double v = row(k);
        if (v < value) {
            value = v;
            best = k;
        }
    }
    return best;
}

void LowerEnvelope::lower_apply_into(std::span<const double> f, std::span<double> out) const {
    const std::size_t n = f.size();
    if (spec_.kind() == RateSetSpec::Kind::interval) {
        for (std::size_t x = 0; x < n; ++x) out[x] = interval_row(x, f);
    } else {
        for (std::size_t x = 0; x < n; ++x) finite_argmin(x, f, out[x]);
    }
}

Gamble LowerEnvelope::lower_apply(const Gamble& f) const {
    require_same_space(space(), f.space());
    std::vector<double> out(size());
    lower_apply_into(f.values(), out);
    return Gamble(f.space(), std::move(out));
}

Gamble LowerEnvelope::upper_apply(const Gamble& f) const { return -lower_apply(-f); }

RateMatrix LowerEnvelope::achieving_member(const Gamble& f) const {
    require_same_space(space(), f.space());
    const std::size_t n = size();
    const auto fv = f.values();
    std::vector<double> e(n * n, 0.0);
    const bool interval = spec_.kind() == RateSetSpec::Kind::interval;
    for (std::size_t x = 0; x < n; ++x) {
        const RateMatrix* member = nullptr;
        if (!interval) {
            double unused;
            member = &spec_.members()[finite_argmin(x, fv, unused)];
        }
        double off = 0.0;
        for (std::size_t y = 0; y < n; ++y) {
            if (y == x) continue;
            double rate;
            if (interval) {
                rate = fv[y] - fv[x] >= 0.0 ? spec_.lower_bounds()(x, y) : spec_.upper_bounds()(x, y);
            } else {
                rate = (*member)(x, y);
            }
            e[x * n + y] = rate;
            off += rate;
        }
        e[x * n + x] = -off;
    }
    return RateMatrix(SquareMatrix(space(), std::move(e)));
}

// ---------------------------------------------------------------------------

double AxiomReport::worst_residual() const {
    return std::max({lr1.worst_residual, lr2.worst_residual, lr3.worst_residual, lr4.worst_residual});
}

AxiomReport check_lower_rate_axioms(const GambleOperator& op, const StateSpace& space, const AxiomProbes& probes) {
    if (probes.pairs.empty() && probes.scalars.empty()) throw InvalidArgument("axiom check needs probes");
    AxiomReport report;
    const std::size_t n = space.size();
    auto note = [](AxiomResult& r, double residual) {
        r.worst_residual = std::max(r.worst_residual, residual);
        if (residual > kAxiomTolerance) r.passed = false;
    };

    // LR1: constants map to zero.
    std::vector<double> constants = probes.scalars;
    constants.push_back(1.0);
    for (double mu : constants) {
        auto out = op(Gamble::constant(space, mu));
        note(report.lr1, max_norm(out));
    }

    // LR2: [Q̲ 1_y](x) >= 0 for x != y.
    for (std::size_t y = 0; y < n; ++y) {
        auto out = op(Gamble::indicator(space, y));
        for (std::size_t x = 0; x < n; ++x) {
            if (x != y) note(report.lr2, std::max(0.0, -out[x]));
        }
    }

    for (const auto& [f, g] : probes.pairs) {
        // LR3: Q̲(f+g) >= Q̲f + Q̲g.
        auto sum = op(f + g);
        auto qf = op(f);
        auto qg = op(g);
        for (std::size_t x = 0; x < n; ++x) note(report.lr3, std::max(0.0, qf[x] + qg[x] - sum[x]));

        // LR4: Q̲(λf) = λ Q̲f for λ >= 0.
        for (double s : probes.scalars) {
            const double lambda = std::abs(s);
            auto scaled = op(lambda * f);
            for (std::size_t x = 0; x < n; ++x) note(report.lr4, std::abs(scaled[x] - lambda * qf[x]));
        }
    }
    return report;
}

AxiomReport check_lower_rate_axioms(const LowerEnvelope& env, const AxiomProbes& probes) {
    return check_lower_rate_axioms([&env](const Gamble& f) { return env.lower_apply(f); }, env.space(), probes);
}

DominanceReport dominance_falsifier(const RateMatrix& q, const LowerEnvelope& env, std::span<const Gamble> probes) {
    require_same_space(q.space(), env.space());
    DominanceReport report;
    report.worst_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < probes.size(); ++i) {
        const auto qf = apply_matrix(q, probes[i]);
        const auto lf = env.lower_apply(probes[i]);
        for (std::size_t x = 0; x < qf.size(); ++x) {
            const double gap = qf[x] - lf[x];
            report.worst_gap = std::min(report.worst_gap, gap);
            if (gap < -kAxiomTolerance && !report.violated) {
                report.violated = true;
                report.probe = i;
                report.state = x;
            }
        }
    }
    if (probes.empty()) report.worst_gap = 0.0;
    return report;
}

} // namespace ictmc
