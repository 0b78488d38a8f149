#pragma once

// JSON model and query documents.
//
// Model:
//   {"states": ["h", "s"],
//    "rate_set": {"kind": "interval",
//                 "lower": [[null, "1/52"], ["1/2", null]],
//                 "upper": [[null, "3/52"], [2, null]]},
//    "initial_set": {"kind": "vacuous"}}
//
// Query:
//   {"kind": "lower_probability",
//    "condition": {"times": [0], "states": ["s"]},
//    "target": {"times": [1],
//               "function": {"kind": "indicator_state", "time": 1, "state": "s"}},
//    "epsilon": 0.001}
//
// Numbers may be JSON numbers or strings holding a decimal or a fraction "p/q".

#include "ictmc/envelope.hpp"
#include "ictmc/inference.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ictmc {

/// Malformed document text or structure. line/column are 1-based and zero
/// when the problem is structural rather than lexical.
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t line = 0, std::size_t column = 0);
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// Parses a number literal: decimal ("0.5", "1e-3") or fraction ("1/52", "-3/4").
double parse_number_literal(std::string_view text);

struct ModelDocument {
    StateSpace states;
    RateSetSpec rate_set;
    std::optional<InitialSet> initial_set;

    friend bool operator==(const ModelDocument&, const ModelDocument&) = default;
};

/// Throws ParseError for syntax/structure problems and ValidationError when a
/// parsed rate matrix, bound pair or pmf breaks its invariants.
ModelDocument parse_model(std::string_view text);
std::string serialize_model(const ModelDocument& model);

enum class QueryKind {
    conditional,
    unconditional,
    lower_expectation,
    upper_expectation,
    lower_probability,
    upper_probability,
};

struct QueryDocument {
    QueryKind kind = QueryKind::lower_expectation;
    std::vector<double> condition_times;
    std::optional<StateTuple> condition_states; // one history, or all when absent
    MultiGamble target;                         // over condition times ∪ target times
    double epsilon = 0.0;

    bool conditional() const { return !condition_times.empty(); }
    bool upper() const { return kind == QueryKind::upper_expectation || kind == QueryKind::upper_probability; }
    bool probability() const { return kind == QueryKind::lower_probability || kind == QueryKind::upper_probability; }
};

/// Parses a query against the model's state space; all invariant failures
/// (time ordering, table length, epsilon) are reported as ParseError.
QueryDocument parse_query(std::string_view text, const StateSpace& space);

/// One output row: the conditioning history (empty for unconditional queries).
struct QueryRow {
    std::vector<std::string> history;
    double value = 0.0;
    double bound = 0.0;
};

struct QueryOutcome {
    std::vector<QueryRow> rows;
    double epsilon = 0.0;
    std::uint64_t steps_total = 0;
};

QueryOutcome run_query(const ModelDocument& model, const QueryDocument& query,
                       std::uint64_t cap = kDefaultStepCap);

/// Shortest decimal text that reads back to the same double.
std::string format_number(double value);

} // namespace ictmc
