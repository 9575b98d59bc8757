#include "patterns/patterns.hpp"

#include <algorithm>

#include "core/error.hpp"

namespace stratos {

const char* const kRankingRule = "validity_then_counterparty_count";

const char* var_sort_name(VarSort s) {
    return s == VarSort::UnitVar ? "unit" : "source";
}

std::optional<VarSort> var_sort_from_name(const std::string& s) {
    if (s == "unit") return VarSort::UnitVar;
    if (s == "source") return VarSort::SourceVar;
    return std::nullopt;
}

namespace {

bool is_slot(const std::string& id) { return !id.empty() && id[0] == '$'; }

std::string slot_name(const std::string& id) { return id.substr(1); }

std::set<UnitId> units_in(const Sourcement& sm) {
    std::set<UnitId> out;
    for (const auto& b : sm.basics) out.insert(b.owner);
    return out;
}

std::set<SourceId> sources_in(const Sourcement& sm) {
    std::set<SourceId> out;
    for (const auto& b : sm.basics) out.insert(b.sources.begin(), b.sources.end());
    for (const auto* list : sm.attributes.ref_lists()) {
        out.insert(list->begin(), list->end());
    }
    return out;
}

}  // namespace

Pattern abstract_sourcement(const WorldState& state, const Sourcement& sm,
                            const std::set<UnitId>& vary_units,
                            const std::set<SourceId>& vary_sources) {
    if (vary_units.count(sm.principal)) {
        throw Error(Errc::PrincipalNotAbstractable, "the principal '" + sm.principal.str() +
                                                        "' stays concrete; the outsourcer does "
                                                        "not vary");
    }
    auto present_units = units_in(sm);
    auto present_sources = sources_in(sm);
    for (const auto& u : vary_units) {
        if (!present_units.count(u)) throw_unknown("unit", u.str());
    }
    for (const auto& s : vary_sources) {
        if (!present_sources.count(s)) throw_unknown("source", s.str());
    }

    Pattern p;
    p.id = sm.id;
    p.skeleton = sm;
    for (const auto& u : vary_units) {
        p.variables.push_back(Variable{u.str(), VarSort::UnitVar});
    }
    for (const auto& s : vary_sources) {
        p.variables.push_back(Variable{s.str(), VarSort::SourceVar});
        VarConstraint c;
        c.variable = s.str();
        if (state.has_source(s)) {
            c.source_type = state.source(s).type;
            c.requirement = "a source of type " + c.source_type->str();
            p.constraints.push_back(std::move(c));
        }
    }

    for (auto& b : p.skeleton.basics) {
        if (vary_units.count(b.owner)) b.owner = UnitId("$" + b.owner.str());
        for (auto& m : b.sources) {
            if (vary_sources.count(m)) m = SourceId("$" + m.str());
        }
    }
    for (auto* list : p.skeleton.attributes.ref_lists()) {
        for (auto& r : *list) {
            if (vary_sources.count(r)) r = SourceId("$" + r.str());
        }
    }
    return p;
}

Diagnostics lot_diagnostics(const Lot& lot) {
    Diagnostics out;
    if (lot.patterns.empty()) {
        out.push_back(error_diag("LOT_EMPTY", {lot.id}, "lot '" + lot.id +
                                                            "' combines no patterns"));
        return out;
    }
    std::set<UnitId> principals;
    for (std::size_t i = 0; i < lot.patterns.size(); ++i) {
        const Pattern& p = lot.patterns[i];
        std::set<std::string> declared;
        for (const auto& v : p.variables) {
            if (!declared.insert(v.name).second) {
                out.push_back(error_diag("VARIABLE_REDECLARED", {p.id, v.name},
                                         "variable '" + v.name + "' declared twice in pattern '" +
                                             p.id + "'"));
            }
        }
        if (is_slot(p.skeleton.principal.str())) {
            out.push_back(error_diag("PRINCIPAL_IS_VARIABLE", {p.id},
                                     "the principal of pattern '" + p.id +
                                         "' must stay concrete"));
        } else {
            principals.insert(p.skeleton.principal);
        }
        auto check_slot = [&](const std::string& raw) {
            if (is_slot(raw) && !declared.count(slot_name(raw))) {
                out.push_back(error_diag("UNDECLARED_SLOT", {p.id, slot_name(raw)},
                                         "slot '$" + slot_name(raw) +
                                             "' has no variable declaration in pattern '" + p.id +
                                             "'"));
            }
        };
        for (const auto& b : p.skeleton.basics) {
            check_slot(b.owner.str());
            for (const auto& m : b.sources) check_slot(m.str());
        }
        for (const auto* list : p.skeleton.attributes.ref_lists()) {
            for (const auto& r : *list) check_slot(r.str());
        }
        for (const auto& c : p.constraints) {
            if (!declared.count(c.variable)) {
                out.push_back(error_diag("UNDECLARED_SLOT", {p.id, c.variable},
                                         "constraint names unknown variable '" + c.variable +
                                             "' in pattern '" + p.id + "'"));
            }
        }
    }
    if (principals.size() > 1) {
        out.push_back(warning_diag("PATTERN_PRINCIPAL_MIXED", {lot.id},
                                   "lot '" + lot.id +
                                       "' combines patterns of different principals"));
    }
    return out;
}

std::vector<std::pair<std::string, Variable>> lot_variables(const Lot& lot) {
    std::vector<std::pair<std::string, Variable>> out;
    for (std::size_t i = 0; i < lot.patterns.size(); ++i) {
        for (const auto& v : lot.patterns[i].variables) {
            out.emplace_back(std::to_string(i) + "." + v.name, v);
        }
    }
    return out;
}

namespace {

struct ResolvedVar {
    std::size_t pattern_index = 0;
    Variable var;
};

// bare names resolve when unique across the lot; qualified names always do
std::optional<ResolvedVar> resolve_var(const Lot& lot, const std::string& key,
                                       Diagnostics& out) {
    auto dot = key.find('.');
    if (dot != std::string::npos) {
        std::size_t index = 0;
        try {
            index = std::stoul(key.substr(0, dot));
        } catch (...) {
            out.push_back(error_diag("UNKNOWN_VARIABLE", {key},
                                     "binding names no lot variable '" + key + "'"));
            return std::nullopt;
        }
        std::string name = key.substr(dot + 1);
        if (index < lot.patterns.size()) {
            for (const auto& v : lot.patterns[index].variables) {
                if (v.name == name) return ResolvedVar{index, v};
            }
        }
        out.push_back(error_diag("UNKNOWN_VARIABLE", {key},
                                 "binding names no lot variable '" + key + "'"));
        return std::nullopt;
    }
    std::vector<ResolvedVar> hits;
    for (std::size_t i = 0; i < lot.patterns.size(); ++i) {
        for (const auto& v : lot.patterns[i].variables) {
            if (v.name == key) hits.push_back(ResolvedVar{i, v});
        }
    }
    if (hits.empty()) {
        out.push_back(error_diag("UNKNOWN_VARIABLE", {key},
                                 "binding names no lot variable '" + key + "'"));
        return std::nullopt;
    }
    if (hits.size() > 1) {
        out.push_back(error_diag("AMBIGUOUS_VARIABLE", {key},
                                 "'" + key + "' occurs in several patterns; qualify it as "
                                             "<pattern index>." +
                                     key));
        return std::nullopt;
    }
    return hits.front();
}

void check_binding(const Lot& lot, const ResolvedVar& rv, const std::string& value,
                   const WorldState& market, Diagnostics& out) {
    const Pattern& p = lot.patterns[rv.pattern_index];
    if (rv.var.sort == VarSort::UnitVar) {
        if (market.has_unit(UnitId(value))) return;
        if (market.has_source(SourceId(value))) {
            out.push_back(error_diag("SORT_MISMATCH", {rv.var.name, value},
                                     "'" + value + "' is a source but '" + rv.var.name +
                                         "' wants a unit"));
        } else {
            out.push_back(error_diag("UNRESOLVED_REF", {rv.var.name, value},
                                     "no unit '" + value + "' in the market"));
        }
        return;
    }
    if (!market.has_source(SourceId(value))) {
        if (market.has_unit(UnitId(value))) {
            out.push_back(error_diag("SORT_MISMATCH", {rv.var.name, value},
                                     "'" + value + "' is a unit but '" + rv.var.name +
                                         "' wants a source"));
        } else {
            out.push_back(error_diag("UNRESOLVED_REF", {rv.var.name, value},
                                     "no source '" + value + "' in the market"));
        }
        return;
    }
    const Source& s = market.source(SourceId(value));
    for (const auto& c : p.constraints) {
        if (c.variable != rv.var.name) continue;
        if (c.source_type && !(s.type == *c.source_type)) {
            out.push_back(error_diag("TYPE_CONSTRAINT", {rv.var.name, value},
                                     "'" + value + "' has type '" + s.type.str() +
                                         "' but the pattern wants '" + c.source_type->str() +
                                         "'"));
        }
        if (c.singleton && market.has_source_type(s.type) &&
            market.source_type(s.type).singleton != *c.singleton) {
            out.push_back(error_diag("SINGLETON_CONSTRAINT", {rv.var.name, value},
                                     "'" + value + "' does not meet the singleton requirement"));
        }
    }
}

}  // namespace

Diagnostics validate_bid(const Lot& lot, const Bid& bid, const WorldState& market) {
    Diagnostics out;
    if (bid.lot != lot.id) {
        out.push_back(error_diag("BID_WRONG_LOT", {bid.id, bid.lot},
                                 "bid '" + bid.id + "' addresses lot '" + bid.lot + "', not '" +
                                     lot.id + "'"));
        return out;
    }
    std::set<std::string> bound;
    for (const auto& [key, value] : bid.bindings) {
        auto rv = resolve_var(lot, key, out);
        if (!rv) continue;
        bound.insert(std::to_string(rv->pattern_index) + "." + rv->var.name);
        check_binding(lot, *rv, value, market, out);
    }
    for (const auto& [qualified, v] : lot_variables(lot)) {
        if (!bound.count(qualified)) {
            out.push_back(error_diag("UNBOUND_VARIABLE", {bid.id, qualified},
                                     "bid '" + bid.id + "' leaves '" + qualified +
                                         "' unbound"));
        }
    }
    for (const auto& s : bid.offered_insourcing) {
        if (!market.has_source(s)) {
            out.push_back(error_diag("UNRESOLVED_REF", {bid.id, s.str()},
                                     "offered insourcing names no source '" + s.str() + "'"));
        }
    }
    return out;
}

Sourcement instantiate(const Pattern& p, const std::map<std::string, std::string>& bindings) {
    std::map<std::string, Variable> declared;
    for (const auto& v : p.variables) declared.emplace(v.name, v);

    auto substitute = [&](const std::string& raw, VarSort wanted) {
        if (!is_slot(raw)) return raw;
        std::string name = slot_name(raw);
        auto dit = declared.find(name);
        if (dit == declared.end()) {
            throw Error(Errc::UnboundVariable, "UNDECLARED",
                        "slot '$" + name + "' has no variable declaration");
        }
        if (dit->second.sort != wanted) {
            throw Error(Errc::SortMismatch, "variable '" + name + "' is a " +
                                                var_sort_name(dit->second.sort) +
                                                " variable but sits in a " +
                                                var_sort_name(wanted) + " position");
        }
        auto bit = bindings.find(name);
        if (bit == bindings.end()) {
            throw Error(Errc::UnboundVariable, "variable '" + name + "' has no binding");
        }
        return bit->second;
    };

    Sourcement out = p.skeleton;
    for (auto& b : out.basics) {
        b.owner = UnitId(substitute(b.owner.str(), VarSort::UnitVar));
        for (auto& m : b.sources) {
            m = SourceId(substitute(m.str(), VarSort::SourceVar));
        }
    }
    for (auto* list : out.attributes.ref_lists()) {
        for (auto& r : *list) {
            r = SourceId(substitute(r.str(), VarSort::SourceVar));
        }
    }
    return out;
}

std::vector<RankedBid> select_fit(const Lot& lot, const std::vector<Bid>& bids,
                                  const WorldState& market) {
    std::vector<RankedBid> out;
    std::vector<int> counterparties;
    for (const auto& b : bids) {
        Diagnostics ds = validate_bid(lot, b, market);
        RankedBid rb;
        rb.bid = b;
        rb.valid = !has_errors(ds);
        std::set<std::string> units;
        for (const auto& [key, value] : b.bindings) {
            Diagnostics sink;
            auto rv = resolve_var(lot, key, sink);
            if (rv && rv->var.sort == VarSort::UnitVar) units.insert(value);
        }
        out.push_back(std::move(rb));
        counterparties.push_back(static_cast<int>(units.size()));
    }
    std::vector<std::size_t> order(out.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (out[a].valid != out[b].valid) return out[a].valid;
        if (!out[a].valid) return false;
        return counterparties[a] < counterparties[b];
    });
    std::vector<RankedBid> ranked;
    ranked.reserve(out.size());
    for (std::size_t i : order) ranked.push_back(std::move(out[i]));
    return ranked;
}

Json pattern_to_json(const Pattern& p) {
    Json j;
    j["id"] = p.id;
    j["skeleton"] = sourcement_to_json(p.skeleton);
    Json vars = Json::array();
    for (const auto& v : p.variables) {
        Json jv;
        jv["name"] = v.name;
        jv["sort"] = var_sort_name(v.sort);
        vars.push_back(jv);
    }
    j["variables"] = vars;
    Json cs = Json::array();
    for (const auto& c : p.constraints) {
        Json jc;
        jc["variable"] = c.variable;
        if (!c.requirement.empty()) jc["requirement"] = c.requirement;
        if (c.source_type) jc["source_type"] = c.source_type->str();
        if (c.singleton) jc["singleton"] = *c.singleton;
        cs.push_back(jc);
    }
    if (!cs.empty()) j["constraints"] = cs;
    return j;
}

Pattern pattern_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("id") || !j.contains("skeleton")) {
        throw Error(Errc::InvalidInput, "BAD_SHAPE", "a pattern needs an id and a skeleton");
    }
    Pattern p;
    p.id = j.at("id").get<std::string>();
    p.skeleton = sourcement_from_json(j.at("skeleton"));
    if (j.contains("variables")) {
        for (const auto& jv : j.at("variables")) {
            Variable v;
            v.name = jv.at("name").get<std::string>();
            auto sort = var_sort_from_name(jv.at("sort").get<std::string>());
            if (!sort) {
                throw Error(Errc::InvalidInput, "BAD_SHAPE", "unknown variable sort");
            }
            v.sort = *sort;
            p.variables.push_back(std::move(v));
        }
    }
    if (j.contains("constraints")) {
        for (const auto& jc : j.at("constraints")) {
            VarConstraint c;
            c.variable = jc.at("variable").get<std::string>();
            if (jc.contains("requirement")) c.requirement = jc.at("requirement").get<std::string>();
            if (jc.contains("source_type")) {
                c.source_type = SourceTypeId(jc.at("source_type").get<std::string>());
            }
            if (jc.contains("singleton")) c.singleton = jc.at("singleton").get<bool>();
            p.constraints.push_back(std::move(c));
        }
    }
    return p;
}

Json lot_to_json(const Lot& l) {
    Json j;
    j["id"] = l.id;
    Json ps = Json::array();
    for (const auto& p : l.patterns) ps.push_back(pattern_to_json(p));
    j["patterns"] = ps;
    return j;
}

Lot lot_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("id") || !j.contains("patterns")) {
        throw Error(Errc::InvalidInput, "BAD_SHAPE", "a lot needs an id and patterns");
    }
    Lot l;
    l.id = j.at("id").get<std::string>();
    for (const auto& jp : j.at("patterns")) l.patterns.push_back(pattern_from_json(jp));
    return l;
}

Json bid_to_json(const Bid& b) {
    Json j;
    j["id"] = b.id;
    j["lot"] = b.lot;
    Json bs;
    for (const auto& [k, v] : b.bindings) bs[k] = v;
    j["bindings"] = bs;
    if (!b.offered_insourcing.empty()) {
        Json offered = Json::array();
        for (const auto& s : b.offered_insourcing) offered.push_back(s.str());
        j["offered_insourcing"] = offered;
    }
    return j;
}

Bid bid_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("id") || !j.contains("lot")) {
        throw Error(Errc::InvalidInput, "BAD_SHAPE", "a bid needs an id and a lot");
    }
    Bid b;
    b.id = j.at("id").get<std::string>();
    b.lot = j.at("lot").get<std::string>();
    if (j.contains("bindings")) {
        for (const auto& [k, v] : j.at("bindings").items()) {
            b.bindings.emplace(k, v.get<std::string>());
        }
    }
    if (j.contains("offered_insourcing")) {
        for (const auto& s : j.at("offered_insourcing")) {
            b.offered_insourcing.push_back(SourceId(s.get<std::string>()));
        }
    }
    return b;
}

}  // namespace stratos
