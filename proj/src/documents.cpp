#include "ictmc/documents.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <set>

namespace ictmc {

using nlohmann::json;

ParseError::ParseError(const std::string& message, std::size_t line, std::size_t column)
    : Error(line ? "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message : message),
      line_(line), column_(column) {}

namespace {

constexpr std::int64_t kMaxExactInteger = std::int64_t{1} << 53;

[[noreturn]] void fail(const std::string& path, const std::string& message) {
    throw ParseError(path.empty() ? message : path + ": " + message);
}

json parse_json(std::string_view text) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        // e.byte is the 1-based offset of the offending byte.
        std::size_t line = 1, column = 1;
        const std::size_t end = std::min<std::size_t>(e.byte ? e.byte - 1 : 0, text.size());
        for (std::size_t i = 0; i < end; ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        std::string message = e.what();
        if (auto pos = message.find("syntax error"); pos != std::string::npos) message = message.substr(pos);
        throw ParseError(message, line, column);
    }
}

const json& member(const json& obj, const char* key, const std::string& path) {
    if (!obj.is_object()) fail(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) fail(path, std::string("missing key '") + key + "'");
    return *it;
}

std::string sub(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string at_index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

double number(const json& v, const std::string& path) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        try {
            return parse_number_literal(v.get<std::string>());
        } catch (const ParseError& e) {
            fail(path, e.what());
        }
    }
    fail(path, "expected a number or a fraction string");
}

double positive_or_zero_time(const json& v, const std::string& path) {
    const double t = number(v, path);
    if (!std::isfinite(t) || t < 0.0) fail(path, "time points must be finite and non-negative");
    return t;
}

std::vector<double> time_list(const json& v, const std::string& path) {
    if (!v.is_array()) fail(path, "expected a list of time points");
    std::vector<double> times;
    for (std::size_t i = 0; i < v.size(); ++i) {
        times.push_back(positive_or_zero_time(v[i], at_index(path, i)));
        if (i > 0 && !(times[i - 1] < times[i])) fail(path, "time points must be strictly increasing");
    }
    return times;
}

std::vector<double> number_row(const json& v, std::size_t n, const std::string& path, std::optional<std::size_t> skip) {
    if (!v.is_array() || v.size() != n) fail(path, "expected a list of " + std::to_string(n) + " numbers");
    std::vector<double> row(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (skip && *skip == i && v[i].is_null()) continue;
        row[i] = number(v[i], at_index(path, i));
        if (skip && *skip == i) row[i] = 0.0; // diagonal bounds are ignored
    }
    return row;
}

SquareMatrix matrix(const json& v, const StateSpace& space, const std::string& path, bool null_diagonal) {
    const std::size_t n = space.size();
    if (!v.is_array() || v.size() != n) fail(path, "expected " + std::to_string(n) + " rows");
    std::vector<std::vector<double>> rows;
    for (std::size_t x = 0; x < n; ++x) {
        rows.push_back(number_row(v[x], n, at_index(path, x), null_diagonal ? std::optional<std::size_t>(x) : std::nullopt));
    }
    return SquareMatrix(space, rows);
}

std::string require_string(const json& v, const std::string& path) {
    if (!v.is_string()) fail(path, "expected a string");
    return v.get<std::string>();
}

std::size_t state_of(const json& v, const StateSpace& space, const std::string& path) {
    const auto label = require_string(v, path);
    auto i = space.find(label);
    if (!i) fail(path, "unknown state '" + label + "'");
    return *i;
}

RateSetSpec parse_rate_set(const json& v, const StateSpace& space) {
    const std::string path = "rate_set";
    const auto kind = require_string(member(v, "kind", path), sub(path, "kind"));
    if (kind == "interval") {
        auto lower = matrix(member(v, "lower", path), space, sub(path, "lower"), true);
        auto upper = matrix(member(v, "upper", path), space, sub(path, "upper"), true);
        try {
            return RateSetSpec::interval(lower, upper);
        } catch (const ValidationError& e) {
            throw ValidationError(e.report(), path);
        }
    }
    if (kind == "finite") {
        const auto& list = member(v, "matrices", path);
        if (!list.is_array() || list.empty()) fail(sub(path, "matrices"), "expected a non-empty list of matrices");
        std::vector<RateMatrix> members;
        for (std::size_t i = 0; i < list.size(); ++i) {
            const auto p = at_index(sub(path, "matrices"), i);
            auto checked = validate_rate_matrix(matrix(list[i], space, p, false));
            if (!checked) throw ValidationError(checked.report, p);
            members.push_back(*checked.value);
        }
        bool separate = false;
        if (auto it = v.find("separately_specified"); it != v.end()) {
            if (!it->is_boolean()) fail(sub(path, "separately_specified"), "expected a boolean");
            separate = it->get<bool>();
        }
        return RateSetSpec::finite(std::move(members), separate);
    }
    fail(sub(path, "kind"), "expected \"interval\" or \"finite\"");
}

InitialSet parse_initial_set(const json& v, const StateSpace& space) {
    const std::string path = "initial_set";
    const auto kind = require_string(member(v, "kind", path), sub(path, "kind"));
    if (kind == "vacuous") return InitialSet::vacuous(space);
    if (kind != "singleton" && kind != "finite") fail(sub(path, "kind"), "expected vacuous, singleton or finite");
    const auto& list = member(v, "pmfs", path);
    if (!list.is_array() || list.empty()) fail(sub(path, "pmfs"), "expected a non-empty list of pmfs");
    if (kind == "singleton" && list.size() != 1) fail(sub(path, "pmfs"), "a singleton set holds exactly one pmf");
    std::vector<std::vector<double>> pmfs;
    for (std::size_t i = 0; i < list.size(); ++i) {
        pmfs.push_back(number_row(list[i], space.size(), at_index(sub(path, "pmfs"), i), std::nullopt));
    }
    try {
        return kind == "singleton" ? InitialSet::singleton(space, pmfs.front()) : InitialSet::finite(space, pmfs);
    } catch (const InvalidArgument& e) {
        ValidationReport report;
        report.violations.push_back({"pmf", 0, std::nullopt, 0.0});
        throw ValidationError(report, sub(path, "pmfs") + " (" + e.what() + ")");
    }
}

json number_json(double v) { return json(v); }

json matrix_json(const SquareMatrix& m, bool null_diagonal) {
    json rows = json::array();
    for (std::size_t x = 0; x < m.size(); ++x) {
        json row = json::array();
        for (std::size_t y = 0; y < m.size(); ++y) {
            row.push_back(null_diagonal && x == y ? json(nullptr) : number_json(m(x, y)));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace

double parse_number_literal(std::string_view text) {
    auto parse_int = [&](std::string_view part) {
        std::int64_t value = 0;
        auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), value);
        if (ec != std::errc() || ptr != part.data() + part.size() || part.empty()) {
            throw ParseError("malformed fraction '" + std::string(text) + "'");
        }
        if (value > kMaxExactInteger || value < -kMaxExactInteger) {
            throw ParseError("fraction part too large in '" + std::string(text) + "'");
        }
        return value;
    };
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        const auto p = parse_int(text.substr(0, slash));
        const auto q = parse_int(text.substr(slash + 1));
        if (q <= 0) throw ParseError("fraction denominator must be positive in '" + std::string(text) + "'");
        return static_cast<double>(p) / static_cast<double>(q);
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty() || !std::isfinite(value)) {
        throw ParseError("malformed number '" + std::string(text) + "'");
    }
    return value;
}

ModelDocument parse_model(std::string_view text) {
    const json doc = parse_json(text);
    if (!doc.is_object()) fail("", "a model document must be a JSON object");

    const auto& labels_json = member(doc, "states", "");
    if (!labels_json.is_array() || labels_json.empty()) fail("states", "expected a non-empty list of labels");
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < labels_json.size(); ++i) labels.push_back(require_string(labels_json[i], at_index("states", i)));
    std::optional<StateSpace> space;
    try {
        space.emplace(std::move(labels));
    } catch (const InvalidArgument& e) {
        fail("states", e.what());
    }

    auto rate_set = parse_rate_set(member(doc, "rate_set", ""), *space);
    std::optional<InitialSet> initial;
    if (auto it = doc.find("initial_set"); it != doc.end()) initial = parse_initial_set(*it, *space);
    return ModelDocument{*space, std::move(rate_set), std::move(initial)};
}

std::string serialize_model(const ModelDocument& model) {
    json doc;
    doc["states"] = model.states.labels();
    json rate;
    const auto& spec = model.rate_set;
    if (spec.kind() == RateSetSpec::Kind::interval) {
        rate["kind"] = "interval";
        rate["lower"] = matrix_json(spec.lower_bounds(), true);
        rate["upper"] = matrix_json(spec.upper_bounds(), true);
    } else {
        rate["kind"] = "finite";
        json list = json::array();
        for (const auto& m : spec.members()) list.push_back(matrix_json(m.matrix(), false));
        rate["matrices"] = std::move(list);
        rate["separately_specified"] = spec.separately_specified();
    }
    doc["rate_set"] = std::move(rate);
    if (model.initial_set) {
        json init;
        switch (model.initial_set->kind()) {
        case InitialSet::Kind::vacuous: init["kind"] = "vacuous"; break;
        case InitialSet::Kind::singleton: init["kind"] = "singleton"; break;
        case InitialSet::Kind::finite: init["kind"] = "finite"; break;
        }
        if (model.initial_set->kind() != InitialSet::Kind::vacuous) init["pmfs"] = model.initial_set->pmfs();
        doc["initial_set"] = std::move(init);
    }
    return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------

namespace {

QueryKind query_kind(const std::string& name) {
    if (name == "conditional") return QueryKind::conditional;
    if (name == "unconditional") return QueryKind::unconditional;
    if (name == "lower_expectation") return QueryKind::lower_expectation;
    if (name == "upper_expectation") return QueryKind::upper_expectation;
    if (name == "lower_probability") return QueryKind::lower_probability;
    if (name == "upper_probability") return QueryKind::upper_probability;
    fail("kind", "unknown query kind '" + name + "'");
}

std::size_t position_of(const std::vector<double>& times, double t, const std::string& path) {
    auto it = std::find(times.begin(), times.end(), t);
    if (it == times.end()) fail(path, "time point is not part of the query");
    return static_cast<std::size_t>(it - times.begin());
}

} // namespace

QueryDocument parse_query(std::string_view text, const StateSpace& space) {
    const json doc = parse_json(text);
    if (!doc.is_object()) fail("", "a query document must be a JSON object");

    const QueryKind kind = query_kind(require_string(member(doc, "kind", ""), "kind"));

    const double epsilon = number(member(doc, "epsilon", ""), "epsilon");
    if (!std::isfinite(epsilon) || !(epsilon > 0.0)) fail("epsilon", "epsilon must be positive");

    std::vector<double> condition_times;
    std::optional<StateTuple> condition_states;
    if (auto it = doc.find("condition"); it != doc.end() && !it->is_null()) {
        condition_times = time_list(member(*it, "times", "condition"), "condition.times");
        if (auto st = it->find("states"); st != it->end() && !st->is_null()) {
            if (!st->is_array() || st->size() != condition_times.size()) {
                fail("condition.states", "expected one state per conditioning time");
            }
            StateTuple states;
            for (std::size_t i = 0; i < st->size(); ++i) states.push_back(state_of((*st)[i], space, at_index("condition.states", i)));
            condition_states = std::move(states);
        }
    }
    if (kind == QueryKind::conditional && condition_times.empty()) fail("condition", "a conditional query needs conditioning times");
    if (kind == QueryKind::unconditional && !condition_times.empty()) fail("condition", "an unconditional query takes no condition");

    const auto& target = member(doc, "target", "");
    const auto target_times = time_list(member(target, "times", "target"), "target.times");
    if (target_times.empty()) fail("target.times", "expected at least one time point");

    // Full time axis: conditioning times, then the future times.
    std::vector<double> times = condition_times;
    for (double t : target_times) {
        if (std::find(condition_times.begin(), condition_times.end(), t) != condition_times.end()) continue;
        if (!condition_times.empty() && !(t > condition_times.back())) {
            fail("target.times", "future time points must come after every conditioning time");
        }
        times.push_back(t);
    }
    if (!condition_times.empty() && times.size() == condition_times.size()) {
        fail("target.times", "a conditional query needs at least one future time point");
    }

    const auto& fn = member(target, "function", "target");
    const auto fn_kind = require_string(member(fn, "kind", "target.function"), "target.function.kind");
    std::optional<MultiGamble> f;
    if (fn_kind == "table") {
        const auto& values = member(fn, "values", "target.function");
        const std::size_t expected = checked_power(space.size(), target_times.size());
        if (!values.is_array() || values.size() != expected) {
            fail("target.function.values", "expected " + std::to_string(expected) + " values (|X|^|times|)");
        }
        std::vector<double> table;
        for (std::size_t i = 0; i < values.size(); ++i) table.push_back(number(values[i], at_index("target.function.values", i)));
        f = MultiGamble(space, target_times, std::move(table)).extend(times);
    } else if (fn_kind == "indicator_state") {
        const double t = positive_or_zero_time(member(fn, "time", "target.function"), "target.function.time");
        const std::size_t pos = position_of(times, t, "target.function.time");
        const std::size_t state = state_of(member(fn, "state", "target.function"), space, "target.function.state");
        f = MultiGamble::tabulate(space, times, [&](const StateTuple& x) { return x[pos] == state ? 1.0 : 0.0; });
    } else if (fn_kind == "indicator_equal") {
        const std::size_t a = position_of(times, positive_or_zero_time(member(fn, "time_a", "target.function"), "target.function.time_a"),
                                          "target.function.time_a");
        const std::size_t b = position_of(times, positive_or_zero_time(member(fn, "time_b", "target.function"), "target.function.time_b"),
                                          "target.function.time_b");
        f = MultiGamble::tabulate(space, times, [&](const StateTuple& x) { return x[a] == x[b] ? 1.0 : 0.0; });
    } else {
        fail("target.function.kind", "expected table, indicator_state or indicator_equal");
    }

    QueryDocument query{kind, std::move(condition_times), std::move(condition_states), std::move(*f), epsilon};
    if (query.probability() && !query.target.is_indicator()) {
        fail("target.function", "a probability query needs a 0/1 indicator function");
    }
    return query;
}

// ---------------------------------------------------------------------------

std::string format_number(double value) {
    char buffer[64];
    auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, ptr);
}

QueryOutcome run_query(const ModelDocument& model, const QueryDocument& query, std::uint64_t cap) {
    LowerEnvelope env(model.rate_set);
    QueryOutcome outcome;
    outcome.epsilon = query.epsilon;
    auto labels = [&](std::span<const std::size_t> states) {
        std::vector<std::string> out;
        for (auto s : states) out.push_back(model.states.label(s));
        return out;
    };

    if (!query.conditional()) {
        UnconditionalQuery q{model.initial_set.value_or(InitialSet::vacuous(model.states)), query.target, query.epsilon};
        auto r = query.upper() ? upper_unconditional(env, q, cap) : unconditional(env, q, cap);
        outcome.rows.push_back({{}, r.value, r.error_bound});
        outcome.steps_total = r.steps;
        return outcome;
    }

    ConditionalQuery q{query.condition_times, query.target, query.epsilon};
    if (query.condition_states) {
        auto r = query.upper() ? upper_conditional_value(env, q, *query.condition_states, cap)
                               : conditional_value(env, q, *query.condition_states, cap);
        outcome.rows.push_back({labels(*query.condition_states), r.value, r.error_bound});
        outcome.steps_total = r.steps;
        return outcome;
    }
    auto r = query.upper() ? upper_conditional(env, q, cap) : conditional_multi_future(env, q, cap);
    const auto table = r.values.table();
    for (std::size_t i = 0; i < table.size(); ++i) {
        outcome.rows.push_back({labels(r.values.decode(i)), table[i], r.error_bound});
    }
    outcome.steps_total = r.steps;
    return outcome;
}

} // namespace ictmc
