#include "ictmc/documents.hpp"

#include "../support.hpp"

#include <doctest.h>

using namespace ictmc;
using namespace ictmc::testing;

namespace {

const char* kHealth = R"({
  "states": ["h", "s"],
  "rate_set": {"kind": "interval",
               "lower": [[null, "1/52"], ["1/2", null]],
               "upper": [[null, "3/52"], [2, null]]},
  "initial_set": {"kind": "vacuous"}
})";

const char* kSickQuery = R"({
  "kind": "lower_probability",
  "condition": {"times": [0], "states": ["s"]},
  "target": {"times": [1], "function": {"kind": "indicator_state", "time": 1, "state": "s"}},
  "epsilon": 0.001
})";

template <class Fn>
std::string parse_error_of(Fn&& fn) {
    try {
        fn();
    } catch (const ParseError& e) {
        return e.what();
    }
    return "";
}

} // namespace

TEST_CASE("number literals") {
    CHECK(parse_number_literal("1/52") == 1.0 / 52.0);
    CHECK(parse_number_literal("1/52") == 0.019230769230769232);
    CHECK(parse_number_literal("-3/4") == -0.75);
    CHECK(parse_number_literal("0.5") == 0.5);
    CHECK(parse_number_literal("1e-3") == 1e-3);
    CHECK_THROWS_AS(parse_number_literal("1/0"), ParseError);
    CHECK_THROWS_AS(parse_number_literal("1/-2"), ParseError);
    CHECK_THROWS_AS(parse_number_literal("1.5/2"), ParseError);
    CHECK_THROWS_AS(parse_number_literal("abc"), ParseError);
    CHECK_THROWS_AS(parse_number_literal(""), ParseError);
    CHECK_THROWS_AS(parse_number_literal("9007199254740993/1"), ParseError);
}

TEST_CASE("health model document") {
    const ModelDocument model = parse_model(kHealth);
    CHECK(model.states.labels() == std::vector<std::string>{"h", "s"});
    CHECK(model.rate_set == health_spec());
    REQUIRE(model.initial_set);
    CHECK(model.initial_set->kind() == InitialSet::Kind::vacuous);

    const std::string decimal = R"({"states": ["h", "s"], "rate_set": {"kind": "interval",
        "lower": [[null, 0.019230769230769232], [0.5, null]], "upper": [[null, "3/52"], [2, null]]}})";
    CHECK(parse_model(decimal).rate_set == model.rate_set);
}

TEST_CASE("round trip") {
    const ModelDocument health = parse_model(kHealth);
    CHECK(parse_model(serialize_model(health)) == health);

    const char* finite = R"({"states": ["a", "b"],
        "rate_set": {"kind": "finite", "matrices": [[[-1, 1], [2, -2]], [[-3, 3], [1, -1]]],
                     "separately_specified": true},
        "initial_set": {"kind": "finite", "pmfs": [[0.25, 0.75], ["1/3", "2/3"]]}})";
    const ModelDocument model = parse_model(finite);
    CHECK(model.rate_set == two_vertex_spec());
    CHECK(parse_model(serialize_model(model)) == model);

    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const auto space = StateSpace::numbered(2 + trial % 4);
        ModelDocument random{space, trial % 2 ? random_interval_spec(space, rng, 3.0) : random_finite_spec(space, rng, 2, 3.0),
                             std::nullopt};
        CHECK(parse_model(serialize_model(random)) == random);
    }
}

TEST_CASE("model errors") {
    const auto syntax = parse_error_of([] { parse_model("{\n  \"states\": [\"h\",\n  ]\n}"); });
    CHECK(syntax.find("line 3") != std::string::npos);
    try {
        parse_model("{\n  \"states\": [\"h\",\n  ]\n}");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
        CHECK(e.column() >= 1);
    }

    CHECK(parse_error_of([] { parse_model(R"({"states": ["h", "h"], "rate_set": {}})"); }).find("states") !=
          std::string::npos);
    CHECK(parse_error_of([] { parse_model(R"({"states": ["h"]})"); }).find("rate_set") != std::string::npos);
    CHECK(parse_error_of([] {
              parse_model(R"({"states": ["h", "s"], "rate_set": {"kind": "interval", "lower": [[null, 1]], "upper": []}})");
          }).find("rate_set.lower") != std::string::npos);
    CHECK(parse_error_of([] {
              parse_model(R"({"states": ["a"], "rate_set": {"kind": "polytope"}})");
          }).find("rate_set.kind") != std::string::npos);

    const char* swapped = R"({"states": ["h", "s"], "rate_set": {"kind": "interval",
        "lower": [[null, "3/52"], ["1/2", null]], "upper": [[null, "1/52"], [2, null]]}})";
    try {
        parse_model(swapped);
        FAIL("swapped bounds accepted");
    } catch (const ValidationError& e) {
        CHECK(e.context() == "rate_set");
        CHECK(e.report().violations[0].rule == "bounds");
    }

    const char* bad_member = R"({"states": ["a", "b"], "rate_set": {"kind": "finite",
        "matrices": [[[-1, 1], [2, -2]], [[-1, 1], [2, -1]]]}})";
    try {
        parse_model(bad_member);
        FAIL("bad member accepted");
    } catch (const ValidationError& e) {
        CHECK(e.context() == "rate_set.matrices[1]");
    }

    const char* bad_pmf = R"({"states": ["a", "b"], "rate_set": {"kind": "finite", "matrices": [[[0, 0], [0, 0]]]},
        "initial_set": {"kind": "singleton", "pmfs": [[0.5, 0.6]]}})";
    CHECK_THROWS_AS(parse_model(bad_pmf), ValidationError);
}

TEST_CASE("query documents") {
    const auto space = health_space();
    const QueryDocument q = parse_query(kSickQuery, space);
    CHECK(q.kind == QueryKind::lower_probability);
    CHECK(q.condition_times == std::vector<double>{0});
    REQUIRE(q.condition_states);
    CHECK(*q.condition_states == StateTuple{1});
    CHECK(q.target.times() == std::vector<double>{0, 1});
    CHECK(q.target.table()[1] == 1.0);
    CHECK(q.target.table()[2] == 0.0);

    const char* equal = R"({"kind": "lower_probability", "condition": {"times": [0]},
        "target": {"times": [1, 2], "function": {"kind": "indicator_equal", "time_a": 1, "time_b": 2}},
        "epsilon": 0.002})";
    const QueryDocument e = parse_query(equal, space);
    CHECK(e.target.times() == std::vector<double>{0, 1, 2});
    CHECK(e.target.at(StateTuple{1, 0, 0}) == 1.0);
    CHECK(e.target.at(StateTuple{1, 0, 1}) == 0.0);
    CHECK_FALSE(e.condition_states);

    const char* table = R"({"kind": "upper_expectation",
        "target": {"times": [0.5, 1], "function": {"kind": "table", "values": [1, 2, 3, "1/4"]}},
        "epsilon": "1/1000"})";
    const QueryDocument t = parse_query(table, space);
    CHECK(t.upper());
    CHECK_FALSE(t.conditional());
    CHECK(t.epsilon == 1e-3);
    CHECK(t.target.at(StateTuple{1, 1}) == 0.25);
}

TEST_CASE("query document errors") {
    const auto space = health_space();
    auto err = [&](const std::string& text) { return parse_error_of([&] { parse_query(text, space); }); };
    const std::string target = R"("target": {"times": [1], "function": {"kind": "table", "values": [0, 1]}})";

    CHECK(err(R"({"kind": "lower_expectation", "condition": {"times": [0]}, )" + target + R"(, "epsilon": 0})")
              .find("epsilon must be positive") != std::string::npos);
    CHECK(err(R"({"kind": "lower_expectation", "condition": {"times": [0]}, )" + target + R"(, "epsilon": -1})")
              .find("epsilon must be positive") != std::string::npos);
    CHECK(err(R"({"kind": "lower_expectation", "condition": {"times": [2]}, )" + target + R"(, "epsilon": 1})")
              .find("after every conditioning time") != std::string::npos);
    CHECK(err(R"({"kind": "lower_expectation", "condition": {"times": [0, 0]}, )" + target + R"(, "epsilon": 1})")
              .find("strictly increasing") != std::string::npos);
    CHECK(err(R"({"kind": "lower_expectation", "target": {"times": [1, 1], "function": {"kind": "table", "values": [0, 1, 2, 3]}}, "epsilon": 1})")
              .find("strictly increasing") != std::string::npos);
    CHECK(err(R"({"kind": "lower_expectation", "target": {"times": [1], "function": {"kind": "table", "values": [0, 1, 2]}}, "epsilon": 1})")
              .find("expected 2 values") != std::string::npos);
    CHECK(err(R"({"kind": "lower_probability", "target": {"times": [1], "function": {"kind": "table", "values": [0, 0.5]}}, "epsilon": 1})")
              .find("indicator") != std::string::npos);
    CHECK(err(R"({"kind": "sideways", )" + target + R"(, "epsilon": 1})").find("unknown query kind") != std::string::npos);
    CHECK(err(R"({"kind": "conditional", )" + target + R"(, "epsilon": 1})").find("conditioning times") != std::string::npos);
    CHECK(err(R"({"kind": "lower_expectation", "condition": {"times": [0], "states": ["x"]}, )" + target +
              R"(, "epsilon": 1})")
              .find("unknown state") != std::string::npos);
    CHECK(err(R"({"kind": "lower_expectation", "condition": {"times": [0, 1]}, )" + target + R"(, "epsilon": 1})")
              .find("at least one future") != std::string::npos);
}

TEST_CASE("running queries") {
    const ModelDocument model = parse_model(kHealth);
    const QueryOutcome sick = run_query(model, parse_query(kSickQuery, model.states));
    REQUIRE(sick.rows.size() == 1);
    CHECK(sick.rows[0].history == std::vector<std::string>{"s"});
    CHECK(std::abs(sick.rows[0].value - 0.141) <= 1e-3);
    CHECK(sick.rows[0].bound == 1e-3);
    // One 8000-step run per value of the free conditioning state.
    CHECK(sick.steps_total == 16000);

    const char* upper = R"({"kind": "upper_probability", "condition": {"times": [0], "states": ["s"]},
        "target": {"times": [1], "function": {"kind": "indicator_state", "time": 1, "state": "s"}}, "epsilon": 0.001})";
    CHECK(run_query(model, parse_query(upper, model.states)).rows[0].value >= sick.rows[0].value);

    const char* all = R"({"kind": "lower_probability", "condition": {"times": [0]},
        "target": {"times": [1, 2], "function": {"kind": "indicator_equal", "time_a": 1, "time_b": 2}}, "epsilon": 0.002})";
    const QueryOutcome both = run_query(model, parse_query(all, model.states));
    REQUIRE(both.rows.size() == 2);
    CHECK(both.rows[0].history == std::vector<std::string>{"h"});
    CHECK(std::abs(both.rows[0].value - 0.920) <= 2e-3);
    CHECK(std::abs(both.rows[1].value - 0.453) <= 2e-3);
    CHECK(both.rows[1].bound == 2e-3);
}

TEST_CASE("number formatting round-trips") {
    for (double v : {0.0, 1.0, 0.1, 1.0 / 3.0, 1e-300, -2.5e17, 0.14098348905170538}) {
        CHECK(parse_number_literal(format_number(v)) == v);
    }
    CHECK(format_number(0.001) == "0.001");
    CHECK(format_number(4.0) == "4");
}
