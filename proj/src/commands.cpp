#include "ictmc/commands.hpp"

#include "ictmc/oracle.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

namespace ictmc {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot read '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::string join(const std::vector<std::string>& parts, const char* sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

// Best-effort state labels for naming violated entries; the document may be
// broken elsewhere.
std::vector<std::string> labels_from_text(const std::string& text) {
    try {
        auto doc = nlohmann::json::parse(text);
        return doc.at("states").get<std::vector<std::string>>();
    } catch (const std::exception&) {
        return {};
    }
}

std::string describe_violation(const Violation& v, const std::vector<std::string>& labels) {
    auto name = [&](std::size_t i) { return i < labels.size() ? labels[i] : std::to_string(i); };
    std::ostringstream os;
    os << v.rule << " violated at ";
    if (v.col) {
        os << "entry (" << name(v.row) << ", " << name(*v.col) << ")";
    } else {
        os << "row " << name(v.row);
    }
    os << ", residual " << format_number(v.residual);
    return os.str();
}

int guarded(std::ostream& err, const std::function<int()>& body,
            const std::vector<std::string>& labels = {}) {
    try {
        return body();
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const ValidationError& e) {
        err << "validation error";
        if (!e.context().empty()) err << " in " << e.context();
        err << ": ";
        if (!e.report().ok()) {
            err << describe_violation(e.report().violations.front(), labels);
        } else {
            err << e.what();
        }
        err << "\n";
        return kExitValidation;
    } catch (const StepBudgetExceeded& e) {
        err << "step budget exceeded: " << e.what() << "\n";
        return kExitBudget;
    } catch (const IncompatibleFlags& e) {
        err << "incompatible flags: " << e.what() << "\n";
        return kExitIncompatible;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitParse;
    }
}

ModelDocument load_model(const std::string& text) { return parse_model(text); }

void warn_about_model(const ModelDocument& model, std::ostream& err) {
    const auto& spec = model.rate_set;
    if (spec.kind() == RateSetSpec::Kind::finite && !spec.separately_specified()) {
        err << "warning: the finite rate set does not declare separately specified rows; "
               "the bounds are still guaranteed but need not be attained by a member of the set\n";
    }
}

} // namespace

std::uint64_t step_cap_from_environment() {
    const char* raw = std::getenv("ICTMC_STEP_CAP");
    if (!raw || !*raw) return kDefaultStepCap;
    std::uint64_t cap = 0;
    const std::string_view text(raw);
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), cap);
    if (ec != std::errc() || ptr != text.data() + text.size() || cap == 0) {
        throw IncompatibleFlags("ICTMC_STEP_CAP must be a positive integer");
    }
    return cap;
}

// ---------------------------------------------------------------------------

int cmd_validate(const std::string& model_path, std::ostream& out, std::ostream& err) {
    std::string text;
    const int read = guarded(err, [&] {
        text = read_file(model_path);
        return kExitOk;
    });
    if (read != kExitOk) return read;
    return guarded(
        err,
        [&] {
            const ModelDocument model = load_model(text);
            const LowerEnvelope env(model.rate_set);
            const auto& labels = model.states.labels();
            out << "states: " << labels.size() << " (" << join(labels, ", ") << ")\n";
            const auto& spec = model.rate_set;
            if (spec.kind() == RateSetSpec::Kind::interval) {
                out << "rate_set: interval\n";
                out << "  bounds 0 <= lower <= upper: ok\n";
            } else {
                out << "rate_set: finite, " << spec.members().size() << " matrices, separately_specified "
                    << (spec.separately_specified() ? "true" : "false") << "\n";
                for (std::size_t i = 0; i < spec.members().size(); ++i) {
                    const auto report = check_rate_matrix(spec.members()[i].matrix());
                    out << "  matrices[" << i << "] R1 row sums, R2 off-diagonal signs: " << report.describe() << "\n";
                }
            }
            if (model.initial_set) {
                static const char* kinds[] = {"vacuous", "singleton", "finite"};
                out << "initial_set: " << kinds[static_cast<int>(model.initial_set->kind())] << "\n";
            } else {
                out << "initial_set: vacuous (default)\n";
            }
            out << "norm_bound: " << format_number(env.norm_bound()) << "\n";
            out << "ok\n";
            warn_about_model(model, err);
            return kExitOk;
        },
        labels_from_text(text));
}

// ---------------------------------------------------------------------------

int cmd_query(const std::string& model_path, const std::string& query_path, const QueryOptions& options,
              std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const ModelDocument model = load_model(read_file(model_path));
        const QueryDocument query = parse_query(read_file(query_path), model.states);
        warn_about_model(model, err);
        const std::size_t futures = query.target.times().size() - query.condition_times.size();
        if (model.rate_set.kind() == RateSetSpec::Kind::finite && !model.rate_set.separately_specified() &&
            futures > 1) {
            err << "warning: multi-future query on a finite rate set without declared convexity; "
                   "the recursion computes the bound for the convex hull with separately specified rows\n";
        }
        const QueryOutcome outcome = run_query(model, query, options.cap);
        if (options.json) {
            nlohmann::json results = nlohmann::json::array();
            for (const auto& row : outcome.rows) {
                results.push_back({{"history", row.history}, {"value", row.value}, {"bound", row.bound}});
            }
            nlohmann::json doc{{"results", results}, {"epsilon", outcome.epsilon}, {"steps_total", outcome.steps_total}};
            out << doc.dump() << "\n";
        } else {
            for (const auto& row : outcome.rows) {
                if (!row.history.empty()) out << join(row.history, ",") << "\t";
                out << format_number(row.value) << "\t" << format_number(row.bound) << "\n";
            }
        }
        return kExitOk;
    });
}

// ---------------------------------------------------------------------------

namespace {

Gamble sweep_target(const StateSpace& space, const std::string& spec) {
    if (spec.rfind("state:", 0) == 0) {
        const auto label = spec.substr(6);
        const auto index = space.find(label);
        if (!index) throw IncompatibleFlags("unknown state '" + label + "' in --target");
        return Gamble::indicator(space, *index);
    }
    std::vector<double> values;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            values.push_back(parse_number_literal(item));
        } catch (const ParseError& e) {
            throw IncompatibleFlags(std::string("--target: ") + e.what());
        }
    }
    if (values.size() != space.size()) {
        throw IncompatibleFlags("--target needs " + std::to_string(space.size()) + " values");
    }
    return Gamble(space, std::move(values));
}

} // namespace

int cmd_sweep(const std::string& model_path, const SweepOptions& options, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const ModelDocument model = load_model(read_file(model_path));
        if (!(options.t0 >= 0.0) || !std::isfinite(options.t1) || !(options.t0 < options.t1)) {
            throw IncompatibleFlags("need 0 <= t0 < t1");
        }
        if (options.points < 2) throw IncompatibleFlags("need at least 2 points");
        if (!(options.epsilon > 0.0)) throw IncompatibleFlags("epsilon must be positive");
        const Gamble f = sweep_target(model.states, options.target);

        std::optional<std::size_t> condition;
        if (options.condition) {
            condition = model.states.find(*options.condition);
            if (!condition) throw IncompatibleFlags("unknown state '" + *options.condition + "' in --condition");
        }
        if (options.whm_grid) {
            if (!single_free_entry(model.rate_set)) {
                throw IncompatibleFlags("--whm-grid needs an interval model with exactly one free rate");
            }
            if (!condition) throw IncompatibleFlags("--whm-grid needs --condition");
            if (*options.whm_grid < 1) throw IncompatibleFlags("--whm-grid needs at least one point");
        }
        warn_about_model(model, err);

        const LowerEnvelope env(model.rate_set);
        const InitialSet initial = model.initial_set.value_or(InitialSet::vacuous(model.states));
        const auto grid = uniform_grid(options.t0, options.t1, options.points);
        const double segment_epsilon = options.epsilon / static_cast<double>(grid.size());

        out << "t,lower_W" << (options.whm_grid ? ",whm_grid" : "") << "\n";
        Gamble g = f;
        double previous = 0.0;
        for (double t : grid) {
            g = compute_L(env, 0.0, t - previous, g, segment_epsilon, options.cap).value;
            previous = t;
            const double lower = condition ? g[*condition] : lower_exp_initial(initial, g);
            out << format_number(t) << "," << format_number(lower);
            if (options.whm_grid) {
                out << "," << format_number(single_parameter_whm(model.rate_set, *condition, f, t, *options.whm_grid));
            }
            out << "\n";
        }
        return kExitOk;
    });
}

// ---------------------------------------------------------------------------

namespace {

struct CheckResult {
    double worst = 0.0;
    double tolerance = 0.0;
    std::string counterexample; // set when the check fails
};

std::string describe_gamble(const Gamble& f) {
    std::vector<std::string> parts;
    for (std::size_t x = 0; x < f.size(); ++x) parts.push_back(f.space().label(x) + "=" + format_number(f[x]));
    return "(" + join(parts, ", ") + ")";
}

Gamble random_gamble(const StateSpace& space, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::vector<double> v(space.size());
    for (auto& x : v) x = unit(rng);
    return Gamble(space, std::move(v));
}

// Largest amount by which `upper` falls below `lower` in any state.
double shortfall(const Gamble& lower, const Gamble& upper, std::size_t& state) {
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t x = 0; x < lower.size(); ++x) {
        if (lower[x] - upper[x] > worst) {
            worst = lower[x] - upper[x];
            state = x;
        }
    }
    return worst;
}

std::optional<RateMatrix> single_member(const RateSetSpec& spec) {
    if (spec.kind() == RateSetSpec::Kind::finite) {
        if (spec.members().size() == 1) return spec.members().front();
        return std::nullopt;
    }
    if (!(spec.lower_bounds() == spec.upper_bounds())) return std::nullopt;
    return RateMatrix(spec.lower_bounds());
}

CheckResult check_singleton(const ModelDocument& model, const OracleOptions& o, std::mt19937_64& rng) {
    const auto q = single_member(model.rate_set);
    if (!q) throw IncompatibleFlags("--check singleton needs a rate set with exactly one member");
    const LowerEnvelope env(model.rate_set);
    std::uniform_real_distribution<double> horizon(0.0, 3.0);
    CheckResult r{0.0, o.epsilon + 1e-9, {}};
    for (std::size_t i = 0; i < o.probes; ++i) {
        const Gamble f = random_gamble(model.states, rng);
        const double t = horizon(rng);
        const Gamble exact = apply_matrix(matrix_exponential(*q, t).matrix(), f);
        const double residual = max_norm(compute_L(env, 0.0, t, f, o.epsilon, o.cap).value - exact);
        if (residual > r.worst) r.worst = residual;
        if (residual > r.tolerance && r.counterexample.empty()) {
            r.counterexample = "f = " + describe_gamble(f) + ", t = " + format_number(t);
        }
    }
    return r;
}

CheckResult check_dominance(const ModelDocument& model, const OracleOptions& o, std::mt19937_64& rng,
                            bool exhaustive) {
    const auto& spec = model.rate_set;
    if (exhaustive && spec.kind() != RateSetSpec::Kind::finite) {
        throw IncompatibleFlags("--check exhaustive needs a finite rate set");
    }
    const std::size_t n = o.steps ? o.steps : (exhaustive ? 6 : 256);
    if (exhaustive) {
        double sequences = std::pow(static_cast<double>(spec.members().size()), static_cast<double>(n));
        if (sequences > static_cast<double>(kExhaustiveBudget)) {
            throw IncompatibleFlags("--steps too large for an exhaustive search over " +
                                    std::to_string(spec.members().size()) + " matrices");
        }
    }
    const LowerEnvelope env(spec);
    std::uniform_real_distribution<double> horizon(0.0, 1.0);
    CheckResult r{-std::numeric_limits<double>::infinity(), o.epsilon + 1e-9, {}};
    for (std::size_t i = 0; i < o.probes; ++i) {
        const Gamble f = random_gamble(model.states, rng);
        const double s = horizon(rng);
        const Gamble lower = compute_L(env, 0.0, s, f, o.epsilon, o.cap).value;
        const Gamble scheme =
            exhaustive ? exhaustive_markov_min(spec.members(), 0.0, s, n, f) : greedy_markov_scheme(env, 0.0, s, n, f);
        std::size_t state = 0;
        const double gap = shortfall(lower, scheme, state);
        r.worst = std::max(r.worst, gap);
        if (gap > r.tolerance && r.counterexample.empty()) {
            r.counterexample = "f = " + describe_gamble(f) + ", s = " + format_number(s) + ", state " +
                               model.states.label(state) + ": Markov scheme " + format_number(scheme[state]) +
                               " below lower bound " + format_number(lower[state]);
        }
    }
    r.worst = std::max(r.worst, 0.0);
    return r;
}

CheckResult check_axioms(const ModelDocument& model, const OracleOptions& o, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> scale(0.0, 3.0);
    AxiomProbes probes;
    for (std::size_t i = 0; i < o.probes; ++i) {
        probes.pairs.emplace_back(random_gamble(model.states, rng), random_gamble(model.states, rng));
        probes.scalars.push_back(scale(rng));
    }
    const AxiomReport report = check_lower_rate_axioms(LowerEnvelope(model.rate_set), probes);
    CheckResult r{report.worst_residual(), kAxiomTolerance, {}};
    for (const auto* a : {&report.lr1, &report.lr2, &report.lr3, &report.lr4}) {
        if (!a->passed && r.counterexample.empty()) {
            r.counterexample = a->axiom + " residual " + format_number(a->worst_residual);
        }
    }
    return r;
}

} // namespace

int cmd_oracle(const std::string& model_path, const OracleOptions& options, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const ModelDocument model = load_model(read_file(model_path));
        if (options.probes == 0) throw IncompatibleFlags("need at least one probe");
        if (!(options.epsilon > 0.0)) throw IncompatibleFlags("epsilon must be positive");
        std::mt19937_64 rng(options.seed);
        CheckResult r;
        if (options.check == "singleton") {
            r = check_singleton(model, options, rng);
        } else if (options.check == "greedy") {
            r = check_dominance(model, options, rng, false);
        } else if (options.check == "exhaustive") {
            r = check_dominance(model, options, rng, true);
        } else if (options.check == "axioms") {
            r = check_axioms(model, options, rng);
        } else {
            throw IncompatibleFlags("unknown check '" + options.check + "'");
        }
        const bool pass = r.counterexample.empty();
        out << "check: " << options.check << "\n";
        out << "probes: " << options.probes << ", seed " << options.seed << "\n";
        out << "worst residual: " << format_number(r.worst) << " (tolerance " << format_number(r.tolerance) << ")\n";
        if (!pass) {
            out << "counterexample: " << r.counterexample << "\n";
            out << "FAIL\n";
            return kExitOracleFailed;
        }
        out << "PASS\n";
        return kExitOk;
    });
}

} // namespace ictmc
