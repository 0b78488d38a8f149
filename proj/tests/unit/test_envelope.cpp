#include "ictmc/envelope.hpp"

#include "../support.hpp"

#include <doctest.h>

using namespace ictmc;
using namespace ictmc::testing;

namespace {

// Row-wise minimum over every matrix in a list, evaluated with plain inner
// products; an independent reference for both spec kinds.
Gamble brute_force_min(const std::vector<SquareMatrix>& set, const Gamble& f) {
    std::vector<double> out(f.size(), INFINITY);
    for (const auto& q : set) {
        const Gamble g = apply_matrix(q, f);
        for (std::size_t x = 0; x < f.size(); ++x) out[x] = std::min(out[x], g[x]);
    }
    return Gamble(f.space(), out);
}

// Every matrix whose off-diagonal entries sit at a lower or upper bound.
std::vector<SquareMatrix> interval_extremes(const RateSetSpec& spec) {
    const std::size_t n = spec.space().size();
    std::vector<std::pair<std::size_t, std::size_t>> free;
    for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y = 0; y < n; ++y) {
            if (x != y) free.emplace_back(x, y);
        }
    }
    std::vector<SquareMatrix> out;
    for (std::size_t mask = 0; mask < (std::size_t{1} << free.size()); ++mask) {
        std::vector<double> e(n * n, 0.0);
        for (std::size_t i = 0; i < free.size(); ++i) {
            const auto [x, y] = free[i];
            const auto& bound = (mask >> i) & 1u ? spec.upper_bounds() : spec.lower_bounds();
            e[x * n + y] = bound(x, y);
            e[x * n + x] -= bound(x, y);
        }
        out.emplace_back(spec.space(), e);
    }
    return out;
}

AxiomProbes random_probes(const StateSpace& space, std::mt19937_64& rng, std::size_t count) {
    AxiomProbes probes;
    std::uniform_real_distribution<double> scale(0.0, 5.0);
    for (std::size_t i = 0; i < count; ++i) {
        probes.pairs.emplace_back(random_gamble(space, rng, -3, 3), random_gamble(space, rng, -3, 3));
        probes.scalars.push_back(scale(rng));
    }
    return probes;
}

} // namespace

TEST_CASE("interval envelope of the health model") {
    const LowerEnvelope env(health_spec());
    const auto space = env.space();
    const Gamble f = Gamble::indicator(space, 1);
    const Gamble lower = env.lower_apply(f);
    CHECK(lower[0] == 1.0 / 52.0);
    CHECK(lower[1] == -2.0);
    const Gamble upper = env.upper_apply(f);
    CHECK(upper[0] == 3.0 / 52.0);
    CHECK(upper[1] == -0.5);
    CHECK(env.norm_bound() == 4.0);
    CHECK(env.lower_apply(Gamble::constant(space, 0.3)) == Gamble::constant(space, 0.0));
    CHECK(env.upper_apply(Gamble::constant(space, -2.0)) == Gamble::constant(space, 0.0));
}

TEST_CASE("finite envelope of two vertices") {
    const LowerEnvelope env(two_vertex_spec());
    const auto space = env.space();
    CHECK(env.lower_apply(Gamble(space, {1, 0})) == Gamble(space, {-3, 1}));
    CHECK(env.norm_bound() == 6.0);

    const RateMatrix q = env.achieving_member(Gamble(space, {1, 0}));
    CHECK(q == matrix_b(space));
}

TEST_CASE("zero rate set") {
    const auto space = StateSpace::numbered(3);
    const LowerEnvelope env(RateSetSpec::finite({RateMatrix(SquareMatrix::zero(space))}));
    CHECK(env.norm_bound() == 0.0);
    const LowerEnvelope one(RateSetSpec::finite({RateMatrix(SquareMatrix::zero(StateSpace::numbered(1)))}));
    CHECK(one.lower_apply(Gamble(StateSpace::numbered(1), {4.0}))[0] == 0.0);
}

TEST_CASE("interval bounds are validated") {
    const auto space = health_space();
    const SquareMatrix lo(space, {{0, 3.0 / 52.0}, {0.5, 0}});
    const SquareMatrix hi(space, {{0, 1.0 / 52.0}, {2, 0}});
    try {
        RateSetSpec::interval(lo, hi);
        FAIL("swapped bounds accepted");
    } catch (const ValidationError& e) {
        REQUIRE(e.report().violations.size() == 1);
        CHECK(e.report().violations[0].rule == "bounds");
        CHECK(e.report().violations[0].row == 0);
        CHECK(*e.report().violations[0].col == 1);
    }
    CHECK_THROWS_AS(RateSetSpec::interval(SquareMatrix(space, {{0, -0.1}, {0, 0}}), SquareMatrix(space, {{0, 1}, {0, 0}})),
                    ValidationError);
    CHECK_THROWS_AS(RateSetSpec::finite({}), InvalidArgument);
}

TEST_CASE("envelope matches brute force over extreme matrices") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 60; ++trial) {
        const auto space = StateSpace::numbered(2 + trial % 3);
        const RateSetSpec spec = random_interval_spec(space, rng, 2.0);
        const LowerEnvelope env(spec);
        const auto extremes = interval_extremes(spec);
        for (int k = 0; k < 10; ++k) {
            const Gamble f = random_gamble(space, rng);
            CHECK(max_abs_diff(env.lower_apply(f).values(), brute_force_min(extremes, f).values()) <= 1e-13);
        }
    }
    for (int trial = 0; trial < 60; ++trial) {
        const auto space = StateSpace::numbered(2 + trial % 5);
        const RateSetSpec spec = random_finite_spec(space, rng, 1 + trial % 4, 3.0);
        const LowerEnvelope env(spec);
        std::vector<SquareMatrix> members;
        for (const auto& m : spec.members()) members.push_back(m.matrix());
        for (int k = 0; k < 10; ++k) {
            const Gamble f = random_gamble(space, rng);
            CHECK(max_abs_diff(env.lower_apply(f).values(), brute_force_min(members, f).values()) <= 1e-13);
        }
    }
}

TEST_CASE("envelope properties on random specs") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 40; ++trial) {
        // Interval sets up to 4 states keep the extreme list at 4096 matrices.
        const auto space = StateSpace::numbered(2 + trial % 3);
        const RateSetSpec spec = trial % 2 ? random_interval_spec(space, rng, 3.0) : random_finite_spec(space, rng, 3, 3.0);
        const LowerEnvelope env(spec);
        std::vector<RateMatrix> vertices = spec.kind() == RateSetSpec::Kind::finite ? spec.members() : std::vector<RateMatrix>{};
        if (vertices.empty()) {
            for (const auto& m : interval_extremes(spec)) vertices.emplace_back(m);
        }
        for (int k = 0; k < 20; ++k) {
            const Gamble f = random_gamble(space, rng, -2, 2);
            const Gamble lower = env.lower_apply(f);

            CHECK(env.upper_apply(f) == -env.lower_apply(-f));
            CHECK(max_norm(lower) <= env.norm_bound() * max_norm(f) + 1e-12);

            const RateMatrix q = env.achieving_member(f);
            CHECK(validate_rate_matrix(q.matrix()));
            CHECK(apply_matrix(q, f) == lower);

            const std::vector<Gamble> probes{f};
            bool violated = false;
            for (const auto& m : vertices) violated = violated || dominance_falsifier(m, env, probes).violated;
            CHECK_FALSE(violated);
        }
    }
}

TEST_CASE("widening the rate set never raises the envelope") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 30; ++trial) {
        const auto space = StateSpace::numbered(3);
        const RateSetSpec narrow = random_interval_spec(space, rng, 1.0);
        const SquareMatrix wider_lo = 0.5 * narrow.lower_bounds();
        const SquareMatrix wider_hi = 2.0 * narrow.upper_bounds();
        const LowerEnvelope a(narrow), b(RateSetSpec::interval(wider_lo, wider_hi));

        auto members = random_finite_spec(space, rng, 2, 2.0).members();
        const LowerEnvelope c(RateSetSpec::finite(members));
        members.push_back(random_rate_matrix(space, rng, 2.0));
        const LowerEnvelope d(RateSetSpec::finite(members));
        for (int k = 0; k < 10; ++k) {
            const Gamble f = random_gamble(space, rng);
            const Gamble na = a.lower_apply(f), nb = b.lower_apply(f), nc = c.lower_apply(f), nd = d.lower_apply(f);
            for (std::size_t x = 0; x < 3; ++x) {
                CHECK(nb[x] <= na[x] + 1e-12);
                CHECK(nd[x] <= nc[x]);
            }
        }
    }
}

TEST_CASE("adding the midpoint of two members leaves the envelope unchanged") {
    const auto space = StateSpace({"a", "b"});
    const RateMatrix c(0.5 * (matrix_a(space).matrix() + matrix_b(space).matrix()));
    const LowerEnvelope two(two_vertex_spec());
    const LowerEnvelope three(RateSetSpec::finite({matrix_a(space), matrix_b(space), c}));
    std::mt19937_64 rng(3);
    std::vector<Gamble> probes;
    for (int k = 0; k < 200; ++k) {
        const Gamble f = random_gamble(space, rng);
        CHECK(two.lower_apply(f) == three.lower_apply(f));
        probes.push_back(f);
    }
    CHECK_FALSE(dominance_falsifier(c, two, probes).violated);
}

TEST_CASE("dominance falsifier finds a scaled member") {
    const auto space = StateSpace({"a", "b"});
    const LowerEnvelope env(two_vertex_spec());
    const RateMatrix twice(2.0 * matrix_a(space).matrix());
    const std::vector<Gamble> probes{Gamble(space, {0, 1})};
    const auto report = dominance_falsifier(twice, env, probes);
    CHECK(report.violated);
    CHECK(report.state == 1);
    CHECK(report.worst_gap == doctest::Approx(-2.0));
}

TEST_CASE("achieving member for the health model picks the extreme rates") {
    const LowerEnvelope env(health_spec());
    const auto space = env.space();
    const RateMatrix q = env.achieving_member(Gamble::indicator(space, 1));
    CHECK(q(0, 1) == 1.0 / 52.0);
    CHECK(q(1, 0) == 2.0);
    const RateMatrix any = env.achieving_member(Gamble::constant(space, 1.0));
    CHECK(apply_matrix(any, Gamble::constant(space, 1.0)) == Gamble::constant(space, 0.0));
}

TEST_CASE("lower rate axioms") {
    std::mt19937_64 rng(17);
    const LowerEnvelope health(health_spec());
    CHECK(check_lower_rate_axioms(health, random_probes(health.space(), rng, 100)).all_passed());

    const auto space = StateSpace({"a", "b"});
    const LowerEnvelope single(RateSetSpec::finite({matrix_a(space)}));
    const auto report = check_lower_rate_axioms(single, random_probes(space, rng, 100));
    CHECK(report.all_passed());
    CHECK(report.lr3.worst_residual <= 1e-14);

    CHECK_THROWS_AS(check_lower_rate_axioms(health, AxiomProbes{}), InvalidArgument);
}

TEST_CASE("corrupted envelopes fail the axiom checks") {
    std::mt19937_64 rng(23);
    const auto space = health_space();
    const auto probes = random_probes(space, rng, 100);

    // Swapped bounds: the closed form now selects the larger rate when f rises.
    const SquareMatrix lo(space, {{0, 3.0 / 52.0}, {2, 0}});
    const SquareMatrix hi(space, {{0, 1.0 / 52.0}, {0.5, 0}});
    auto swapped = [&](const Gamble& f) {
        std::vector<double> out(2);
        for (std::size_t x = 0; x < 2; ++x) {
            const std::size_t y = 1 - x;
            const double d = f[y] - f[x];
            out[x] = (d >= 0 ? lo(x, y) : hi(x, y)) * d;
        }
        return Gamble(space, out);
    };
    const auto bad = check_lower_rate_axioms(swapped, space, probes);
    CHECK_FALSE(bad.all_passed());
    CHECK_FALSE(bad.lr3.passed);

    // A negative rate breaks LR2.
    auto negative = [&](const Gamble& f) { return Gamble(space, {-0.5 * (f[1] - f[0]), f[0] - f[1]}); };
    const auto lr2 = check_lower_rate_axioms(negative, space, probes);
    CHECK_FALSE(lr2.lr2.passed);
}
