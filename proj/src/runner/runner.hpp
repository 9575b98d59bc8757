#ifndef STRATOS_RUNNER_RUNNER_HPP
#define STRATOS_RUNNER_RUNNER_HPP

#include <string>
#include <vector>

#include "core/json_io.hpp"
#include "dsl/dsl.hpp"

namespace stratos {

struct RunOptions {
    bool keep_going = false;  // continue past failed steps and assertions
    bool trace = false;       // record every intermediate state digest
};

struct StepResult {
    std::size_t index = 0;
    std::string kind;
    bool ok = false;
    bool executed = false;  // false for satisfied expectations and failures
    std::string detail;     // failure code or unmet expectation
    std::string post_digest;
};

struct AssertionResult {
    AssertionItem item;
    bool passed = false;
    std::string actual;
    std::string message;
};

struct RunReport {
    std::string path;
    std::vector<StepResult> steps;
    std::vector<AssertionResult> assertions;
    std::size_t steps_executed = 0;
    std::size_t assertions_passed = 0;
    std::size_t assertions_failed = 0;
    std::string final_digest;
    std::vector<std::string> trace;
    Diagnostics diagnostics;
    bool ok = false;

    WorldState final_state;
    HistoryLog log;
};

// Executes the script sequentially, threading the event log, and evaluates
// each assertion against the state reached at its position. Without
// keep_going the first failing step ends execution; assertions placed later
// are judged against the last state reached.
RunReport run_scenario(const Scenario& sc, const RunOptions& opts = {});

Json report_to_json(const RunReport& r);

// Query vocabulary shared by assertions and the CLI `query` subcommand.
// Returns the rendered value; throws Error for unknown queries or entities.
std::string evaluate_query(const Scenario& sc, const WorldState& state,
                           const HistoryLog& log, const std::vector<std::string>& query);

}  // namespace stratos

#endif
