#pragma once

// The subcommands behind the ictmc executable. Each returns the process exit
// status and writes results to `out` and diagnostics to `err`.
//
// Exit codes: 0 success, 1 parse error, 2 validation error, 3 step budget
// exceeded, 4 incompatible flags, 5 oracle check failed.

#include "ictmc/documents.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

namespace ictmc {

enum ExitCode : int {
    kExitOk = 0,
    kExitParse = 1,
    kExitValidation = 2,
    kExitBudget = 3,
    kExitIncompatible = 4,
    kExitOracleFailed = 5,
};

/// Flags that do not fit the model in hand.
class IncompatibleFlags : public Error {
public:
    using Error::Error;
};

/// Step cap from ICTMC_STEP_CAP, or kDefaultStepCap when unset.
std::uint64_t step_cap_from_environment();

int cmd_validate(const std::string& model_path, std::ostream& out, std::ostream& err);

struct QueryOptions {
    bool json = false;
    std::uint64_t cap = kDefaultStepCap;
};

int cmd_query(const std::string& model_path, const std::string& query_path, const QueryOptions& options,
              std::ostream& out, std::ostream& err);

struct SweepOptions {
    std::string target;                   // "state:<label>" or comma-separated values
    std::optional<std::string> condition; // state label; the model's initial set when absent
    double t0 = 0.0;
    double t1 = 1.0;
    std::size_t points = 2;
    double epsilon = 1e-3;
    std::optional<std::size_t> whm_grid;
    std::uint64_t cap = kDefaultStepCap;
};

/// CSV "t,lower_W[,whm_grid]", one row per grid point. Rows are computed by
/// chaining L_0^{t_k} f = L_0^{t_k - t_{k-1}} L_0^{t_{k-1}} f (time
/// homogeneity) with the budget split evenly across the segments, so every
/// row is within epsilon.
int cmd_sweep(const std::string& model_path, const SweepOptions& options, std::ostream& out, std::ostream& err);

struct OracleOptions {
    std::string check; // singleton | greedy | exhaustive | axioms
    std::uint64_t seed = 1;
    std::size_t probes = 20;
    std::size_t steps = 0; // Markov scheme steps; 0 picks the check's default
    double epsilon = 1e-6;
    std::uint64_t cap = kDefaultStepCap;
};

int cmd_oracle(const std::string& model_path, const OracleOptions& options, std::ostream& out, std::ostream& err);

} // namespace ictmc
