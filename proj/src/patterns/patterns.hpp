#ifndef STRATOS_PATTERNS_PATTERNS_HPP
#define STRATOS_PATTERNS_PATTERNS_HPP

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "core/diagnostics.hpp"
#include "core/json_io.hpp"
#include "core/model.hpp"

namespace stratos {

enum class VarSort { UnitVar, SourceVar };

const char* var_sort_name(VarSort s);
std::optional<VarSort> var_sort_from_name(const std::string& s);

struct Variable {
    std::string name;
    VarSort sort = VarSort::UnitVar;
};

// Requirements a binding for one variable has to meet. The text is for
// humans; only the typed fields are machine checked.
struct VarConstraint {
    std::string variable;
    std::string requirement;
    std::optional<SourceTypeId> source_type;
    std::optional<bool> singleton;
};

// A sourcement description with holes. Identifier slots starting with '$'
// name a declared variable; the principal is always concrete.
struct Pattern {
    std::string id;
    Sourcement skeleton;
    std::vector<Variable> variables;
    std::vector<VarConstraint> constraints;
};

struct Lot {
    std::string id;
    std::vector<Pattern> patterns;
};

struct Bid {
    std::string id;
    std::string lot;
    std::map<std::string, std::string> bindings;
    std::vector<SourceId> offered_insourcing;
};

struct RankedBid {
    Bid bid;
    bool valid = false;
};

// name of the comparator select_fit applies, reported alongside rankings
extern const char* const kRankingRule;

// Replaces each listed unit and source with a variable named after it.
// Throws Errc::PrincipalNotAbstractable for the principal and UnknownEntity
// for ids that do not occur in the sourcement. Source variables inherit the
// source's type as a constraint.
Pattern abstract_sourcement(const WorldState& state, const Sourcement& sm,
                            const std::set<UnitId>& vary_units,
                            const std::set<SourceId>& vary_sources);

// Structural health of a lot: empty lots, duplicate or undeclared variables,
// variable principals. Mixing principals across patterns is allowed but
// warned about.
Diagnostics lot_diagnostics(const Lot& lot);

// Lot variables carry a "<pattern index>.<name>" qualified form; bids may
// use the bare name when it is unambiguous within the lot.
std::vector<std::pair<std::string, Variable>> lot_variables(const Lot& lot);

Diagnostics validate_bid(const Lot& lot, const Bid& bid, const WorldState& market);

// Substitutes bindings into the skeleton. Throws Errc::UnboundVariable when
// a slot has no binding and Errc::SortMismatch when a slot's position
// contradicts the variable's declared sort.
Sourcement instantiate(const Pattern& p, const std::map<std::string, std::string>& bindings);

// Valid bids first, then fewest distinct counterparty units, ties in given
// order; invalid bids keep their order at the tail.
std::vector<RankedBid> select_fit(const Lot& lot, const std::vector<Bid>& bids,
                                  const WorldState& market);

Json pattern_to_json(const Pattern& p);
Pattern pattern_from_json(const Json& j);
Json lot_to_json(const Lot& l);
Lot lot_from_json(const Json& j);
Json bid_to_json(const Bid& b);
Bid bid_from_json(const Json& j);

}  // namespace stratos

#endif
