#ifndef STRATOS_DSL_DSL_HPP
#define STRATOS_DSL_DSL_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "core/diagnostics.hpp"
#include "core/model.hpp"
#include "douts/douts.hpp"
#include "patterns/patterns.hpp"
#include "transformations/transformations.hpp"

namespace stratos {

// One `apply` statement. `expect` names the precondition code the apply is
// supposed to fail with; the world must then stay unchanged.
struct ScriptItem {
    TransformationSpec spec;
    Timestamp time = 0;
    std::optional<std::string> expect;
    int line = 0;
};

// One `assert` statement. The query tokens are interpreted by the runner;
// `after_step` is how many script items run before the check.
struct AssertionItem {
    std::vector<std::string> query;
    std::string expected;
    std::size_t after_step = 0;
    int line = 0;
};

// Surface form of a pattern declaration plus the pattern it denotes.
struct PatternDecl {
    std::string id;
    std::string sourcement;
    std::vector<std::string> vary;
    Pattern derived;
};

struct LotDecl {
    std::string id;
    std::vector<std::string> patterns;
    Lot derived;
};

struct Scenario {
    WorldState world;
    std::vector<BusinessConfig> business;
    std::vector<ContractConfig> contract_overlays;
    std::map<std::string, DoutsInput> douts;
    std::map<std::string, PatternDecl> patterns;
    std::map<std::string, LotDecl> lots;
    std::map<std::string, Bid> bids;
    std::vector<ScriptItem> script;
    std::vector<AssertionItem> assertions;
};

struct ParseResult {
    Scenario scenario;
    Diagnostics diagnostics;
    bool ok = false;  // no Error-severity diagnostics
};

// Parses one scenario file. Never throws; every problem, including garbage
// input, comes back as a located diagnostic. On success the scenario's
// world and overlays validate cleanly.
ParseResult parse_scenario(const std::string& text);

// Canonical formatting: declarations sorted by (kind, id), script and
// assertions in order, LF line endings. parse(print(s)) reproduces s up to
// digest equality.
std::string print_scenario(const Scenario& s);

// Fingerprint of the canonical text.
std::string scenario_digest(const Scenario& s);

}  // namespace stratos

#endif
