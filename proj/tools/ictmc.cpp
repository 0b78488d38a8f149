// ictmc: lower and upper expectations for imprecise continuous-time Markov chains.

#include "ictmc/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    using namespace ictmc;

    CLI::App app{"Guaranteed-accuracy lower and upper expectations for imprecise continuous-time Markov chains"};
    app.require_subcommand(1);

    std::string model_path;
    std::string query_path;

    auto* validate = app.add_subcommand("validate", "Check a model document and report its norm bound");
    validate->add_option("model", model_path, "Model document (JSON)")->required();

    QueryOptions query_options;
    bool plain = false;
    auto* query = app.add_subcommand("query", "Evaluate a query document against a model");
    query->add_option("model", model_path, "Model document (JSON)")->required();
    query->add_option("query", query_path, "Query document (JSON)")->required();
    auto* json_flag = query->add_flag("--json", query_options.json, "Print one JSON object");
    query->add_flag("--plain", plain, "Print tab-separated lines (default)")->excludes(json_flag);

    SweepOptions sweep_options;
    std::string condition;
    std::size_t whm_grid = 0;
    auto* sweep = app.add_subcommand("sweep", "Tabulate the lower expectation over a time grid as CSV");
    sweep->add_option("model", model_path, "Model document (JSON)")->required();
    sweep->add_option("--target", sweep_options.target, "\"state:<label>\" or comma-separated values")->required();
    auto* condition_opt = sweep->add_option("--condition", condition, "Initial state; the model's initial set if omitted");
    sweep->add_option("--t0", sweep_options.t0, "First time point")->required();
    sweep->add_option("--t1", sweep_options.t1, "Last time point")->required();
    sweep->add_option("--points", sweep_options.points, "Number of grid points")->required();
    sweep->add_option("--epsilon", sweep_options.epsilon, "Error budget per row")->capture_default_str();
    auto* whm_opt = sweep->add_option("--whm-grid", whm_grid, "Add the single-parameter homogeneous-chain minimum over m grid values");

    OracleOptions oracle_options;
    auto* oracle = app.add_subcommand("oracle", "Cross-check the operators against precise-chain computations");
    oracle->add_option("model", model_path, "Model document (JSON)")->required();
    oracle->add_option("--check", oracle_options.check, "Which cross-check to run")
        ->required()
        ->check(CLI::IsMember({"singleton", "greedy", "exhaustive", "axioms"}));
    oracle->add_option("--seed", oracle_options.seed, "Seed for the random probes")->capture_default_str();
    oracle->add_option("--probes", oracle_options.probes, "Number of random probes")->capture_default_str();
    oracle->add_option("--steps", oracle_options.steps, "Markov scheme steps (greedy 256, exhaustive 6)");
    oracle->add_option("--epsilon", oracle_options.epsilon, "Error budget of the lower bound")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitIncompatible;
    }

    std::uint64_t cap = kDefaultStepCap;
    try {
        cap = step_cap_from_environment();
    } catch (const IncompatibleFlags& e) {
        std::cerr << "incompatible flags: " << e.what() << "\n";
        return kExitIncompatible;
    }

    if (*validate) return cmd_validate(model_path, std::cout, std::cerr);
    if (*query) {
        query_options.cap = cap;
        return cmd_query(model_path, query_path, query_options, std::cout, std::cerr);
    }
    if (*sweep) {
        if (*condition_opt) sweep_options.condition = condition;
        if (*whm_opt) sweep_options.whm_grid = whm_grid;
        sweep_options.cap = cap;
        return cmd_sweep(model_path, sweep_options, std::cout, std::cerr);
    }
    oracle_options.cap = cap;
    return cmd_oracle(model_path, oracle_options, std::cout, std::cerr);
}
