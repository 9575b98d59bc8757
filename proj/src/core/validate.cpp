#include "core/validate.hpp"

#include <map>
#include <set>
#include <sstream>

namespace stratos {

namespace {

// Tokens visible above the fact layer, used to tell an upward reference
// apart from a dangling one.
struct UpperLayers {
    std::set<std::string> business;  // profit center / bleeder labels
    std::set<std::string> contract;  // contract, commitment, promise, agreement ids

    const char* layer_of(const std::string& token) const {
        if (contract.count(token)) return "contract";
        if (business.count(token)) return "business";
        return nullptr;
    }
};

UpperLayers collect_upper(const WorldState& state, const std::vector<BusinessConfig>& businesses,
                          const std::vector<ContractConfig>& configs) {
    UpperLayers up;
    for (const auto& [id, c] : state.contracts) up.contract.insert(id.str());
    for (const auto& [id, cm] : state.commitments) up.contract.insert(id.str());
    for (const auto& b : businesses) {
        for (const auto& g : b.profit_centers) up.business.insert(g.label);
        for (const auto& g : b.bleeders) up.business.insert(g.label);
    }
    for (const auto& c : configs) {
        for (const auto& p : c.promises) up.contract.insert(p.id);
        for (const auto& a : c.agreements) up.contract.insert(a.id);
    }
    return up;
}

void check_fact_ref(Diagnostics& out, const UpperLayers& up, bool resolved,
                    const std::string& token, const std::string& context) {
    if (resolved) return;
    if (const char* layer = up.layer_of(token)) {
        out.push_back(error_diag("STRATIFICATION_VIOLATION", {token},
                                 context + " reaches upward into the " + std::string(layer) +
                                     " layer"));
    } else {
        out.push_back(error_diag("UNRESOLVED_REF", {token}, context + " does not resolve"));
    }
}

void check_units(Diagnostics& out, const WorldState& w) {
    for (const auto& [id, u] : w.units) {
        if (id.empty()) out.push_back(error_diag("EMPTY_ID", {}, "unit with empty identifier"));
        if (u.parent && !w.has_unit(*u.parent)) {
            out.push_back(error_diag("UNRESOLVED_REF", {id.str(), u.parent->str()},
                                     "parent of unit '" + id.str() + "' does not resolve"));
        }
    }
    // parent chains must be acyclic
    for (const auto& [id, u] : w.units) {
        std::set<UnitId> seen{id};
        const Unit* cur = &u;
        while (cur->parent && w.has_unit(*cur->parent)) {
            if (!seen.insert(*cur->parent).second) {
                if (*cur->parent == id) {
                    std::vector<std::string> cycle;
                    for (const auto& n : seen) cycle.push_back(n.str());
                    out.push_back(error_diag("UNIT_CYCLE", cycle,
                                             "unit '" + id.str() + "' is its own ancestor"));
                }
                break;
            }
            cur = &w.unit(*cur->parent);
        }
    }
}

void check_sources(Diagnostics& out, const WorldState& w, const UpperLayers& up) {
    for (const auto& [id, s] : w.sources) {
        if (id.empty()) out.push_back(error_diag("EMPTY_ID", {}, "source with empty identifier"));
        if (!w.has_source_type(s.type)) {
            out.push_back(error_diag("UNRESOLVED_REF", {id.str(), s.type.str()},
                                     "type of source '" + id.str() + "' does not resolve"));
        }
        if (!w.has_unit(s.owner)) {
            out.push_back(error_diag("UNRESOLVED_OWNER", {id.str(), s.owner.str()},
                                     "owner of source '" + id.str() + "' does not resolve"));
        }
        for (const auto& d : s.depends_on) {
            check_fact_ref(out, up, w.has_source(d), d.str(),
                           "dependency of source '" + id.str() + "'");
        }
    }

    // singleton rule: at most one source of a singleton type per owner
    std::map<std::pair<UnitId, SourceTypeId>, std::vector<std::string>> held;
    for (const auto& [id, s] : w.sources) {
        if (!w.has_source_type(s.type) || !w.source_type(s.type).singleton) continue;
        held[{s.owner, s.type}].push_back(id.str());
    }
    for (const auto& [key, ids] : held) {
        if (ids.size() < 2) continue;
        std::vector<std::string> ents{key.first.str(), key.second.str()};
        ents.insert(ents.end(), ids.begin(), ids.end());
        out.push_back(error_diag("SINGLETON_VIOLATION", ents,
                                 "unit '" + key.first.str() + "' owns " +
                                     std::to_string(ids.size()) + " sources of singleton type '" +
                                     key.second.str() + "'"));
    }
}

void check_dependency_cycles(Diagnostics& out, const WorldState& w) {
    // sources reachable from each node along depends_on edges
    std::map<SourceId, std::set<SourceId>> reach;
    for (const auto& [id, s] : w.sources) {
        std::vector<SourceId> frontier{id};
        auto& r = reach[id];
        while (!frontier.empty()) {
            SourceId cur = frontier.back();
            frontier.pop_back();
            auto it = w.sources.find(cur);
            if (it == w.sources.end()) continue;
            for (const auto& d : it->second.depends_on) {
                if (w.has_source(d) && r.insert(d).second) frontier.push_back(d);
            }
        }
    }
    std::set<SourceId> reported;
    for (const auto& [id, r] : reach) {
        if (!r.count(id) || reported.count(id)) continue;  // not on a cycle
        std::vector<std::string> cycle;
        for (const auto& other : r) {
            if (reach[other].count(id) && reach[id].count(other)) {
                cycle.push_back(other.str());
                reported.insert(other);
            }
        }
        out.push_back(info_diag("DEPENDENCY_CYCLE", cycle,
                                "sources form a mutual dependency cluster"));
    }
}

void check_themes(Diagnostics& out, const WorldState& w) {
    std::map<std::string, std::set<UnitId>> cluster_maintainers;
    for (const auto& [id, t] : w.themes) {
        if (id.empty()) out.push_back(error_diag("EMPTY_ID", {}, "theme with empty identifier"));
        if (!w.has_unit(t.maintainer)) {
            out.push_back(error_diag("UNRESOLVED_REF", {id.str(), t.maintainer.str()},
                                     "maintainer of theme '" + id.str() + "' does not resolve"));
        }
        if (t.cluster) cluster_maintainers[*t.cluster].insert(t.maintainer);
    }
    for (const auto& [label, maintainers] : cluster_maintainers) {
        if (maintainers.size() > 1) {
            std::vector<std::string> ents{label};
            for (const auto& m : maintainers) ents.push_back(m.str());
            out.push_back(error_diag("THEME_CLUSTER_MIXED_MAINTAINER", ents,
                                     "theme cluster '" + label +
                                         "' spans more than one maintainer"));
        }
    }
}

void check_uses(Diagnostics& out, const WorldState& w) {
    for (const auto& ur : w.use_relations) {
        bool ok = true;
        if (!w.has_unit(ur.user)) {
            out.push_back(error_diag("UNRESOLVED_REF", {ur.user.str()},
                                     "use relation names undeclared unit"));
            ok = false;
        }
        if (!w.has_source(ur.source)) {
            out.push_back(error_diag("UNRESOLVED_REF", {ur.source.str()},
                                     "use relation names undeclared source"));
            ok = false;
        }
        if (!w.has_theme(ur.theme)) {
            out.push_back(error_diag("UNRESOLVED_REF", {ur.theme.str()},
                                     "use relation names undeclared theme"));
            ok = false;
        }
        if (ok && !(w.theme(ur.theme).maintainer == ur.user)) {
            out.push_back(error_diag(
                "USE_THEME_NOT_MAINTAINED", {ur.user.str(), ur.source.str(), ur.theme.str()},
                "unit '" + ur.user.str() + "' uses via theme '" + ur.theme.str() +
                    "' which it does not maintain"));
        }
    }
}

void check_contracts(Diagnostics& out, const WorldState& w) {
    for (const auto& [id, c] : w.contracts) {
        if (id.empty()) out.push_back(error_diag("EMPTY_ID", {}, "contract with empty identifier"));
        for (const auto& [role, unit] :
             {std::pair{"provider", c.provider}, std::pair{"consumer", c.consumer}}) {
            if (!w.has_unit(unit)) {
                out.push_back(error_diag("UNRESOLVED_REF", {id.str(), unit.str()},
                                         std::string(role) + " of contract '" + id.str() +
                                             "' does not resolve"));
            }
        }
        if (!w.has_theme(c.theme)) {
            out.push_back(error_diag("UNRESOLVED_REF", {id.str(), c.theme.str()},
                                     "theme of contract '" + id.str() + "' does not resolve"));
        }
        if (c.provider == c.consumer) {
            out.push_back(error_diag("CONTRACT_PARTIES_EQUAL", {id.str(), c.provider.str()},
                                     "contract '" + id.str() +
                                         "' has identical provider and consumer"));
        }
        if (!(c.period_start < c.period_end)) {
            out.push_back(error_diag("CONTRACT_PERIOD_INVALID", {id.str()},
                                     "contract '" + id.str() + "' period must satisfy start < end"));
        }
        if (c.notice_interval < 0 || c.notice_interval >= c.period_end - c.period_start) {
            out.push_back(error_diag("CONTRACT_NOTICE_INVALID", {id.str()},
                                     "contract '" + id.str() +
                                         "' notice interval must fit inside the period"));
        }
    }
}

void check_commitments(Diagnostics& out, const WorldState& w) {
    std::set<std::pair<UnitId, SourceId>> pairs;
    for (const auto& [id, cm] : w.commitments) {
        if (id.empty())
            out.push_back(error_diag("EMPTY_ID", {}, "commitment with empty identifier"));
        bool ok = true;
        if (!w.has_unit(cm.committed_unit)) {
            out.push_back(error_diag("UNRESOLVED_REF", {id.str(), cm.committed_unit.str()},
                                     "committed unit of '" + id.str() + "' does not resolve"));
            ok = false;
        }
        if (!w.has_source(cm.source)) {
            out.push_back(error_diag("UNRESOLVED_REF", {id.str(), cm.source.str()},
                                     "source of commitment '" + id.str() + "' does not resolve"));
            ok = false;
        }
        if (ok && w.owner_of(cm.source) == cm.committed_unit) {
            out.push_back(error_diag("COMMITMENT_TO_OWNED",
                                     {id.str(), cm.committed_unit.str(), cm.source.str()},
                                     "commitment '" + id.str() +
                                         "' targets a source its unit already owns"));
        }
        if (ok && !pairs.insert({cm.committed_unit, cm.source}).second) {
            out.push_back(error_diag("DUPLICATE_COMMITMENT",
                                     {id.str(), cm.committed_unit.str(), cm.source.str()},
                                     "more than one commitment for the same unit and source"));
        }
    }
}

void check_sourcements(Diagnostics& out, const WorldState& w) {
    for (const auto& [sid, s] : w.sourcements) {
        if (sid.empty())
            out.push_back(error_diag("EMPTY_ID", {}, "sourcement with empty identifier"));
        if (!w.has_unit(s.principal)) {
            out.push_back(error_diag("UNRESOLVED_REF", {sid, s.principal.str()},
                                     "principal of sourcement '" + sid + "' does not resolve"));
        }
        if (s.themes.empty()) {
            out.push_back(error_diag("SOURCEMENT_NO_THEME", {sid},
                                     "sourcement '" + sid + "' declares no theme"));
        }
        for (const auto& t : s.themes) {
            if (!w.has_theme(t)) {
                out.push_back(error_diag("UNRESOLVED_REF", {sid, t.str()},
                                         "theme of sourcement '" + sid + "' does not resolve"));
            } else if (!(w.theme(t).maintainer == s.principal)) {
                out.push_back(error_diag("SOURCEMENT_THEME_NOT_MAINTAINED",
                                         {sid, t.str(), s.principal.str()},
                                         "theme '" + t.str() +
                                             "' is not maintained by the principal of '" + sid +
                                             "'"));
            }
        }
        std::set<SourceId> members;
        for (const auto& b : s.basics) {
            if (b.sources.empty()) {
                out.push_back(
                    error_diag("EMPTY_BASIC", {sid}, "empty basic group in sourcement '" + sid +
                                                         "'"));
            }
            for (const auto& m : b.sources) {
                if (!w.has_source(m)) {
                    out.push_back(error_diag("UNRESOLVED_REF", {sid, m.str()},
                                             "member of sourcement '" + sid +
                                                 "' does not resolve"));
                    continue;
                }
                if (!members.insert(m).second) {
                    out.push_back(error_diag("BASIC_OVERLAP", {sid, m.str()},
                                             "source '" + m.str() +
                                                 "' appears in two basic groups of '" + sid +
                                                 "'"));
                }
                if (!(w.owner_of(m) == b.owner)) {
                    // legal only transiently, while a transition plan runs
                    out.push_back(warning_diag("BASIC_OWNER_DIVERGENT",
                                               {sid, m.str(), b.owner.str()},
                                               "source '" + m.str() + "' has moved away from '" +
                                                   b.owner.str() + "' but its group has not"));
                }
            }
            if (!w.has_unit(b.owner)) {
                out.push_back(error_diag("UNRESOLVED_REF", {sid, b.owner.str()},
                                         "basic owner in sourcement '" + sid +
                                             "' does not resolve"));
            }
        }
        if (s.basics.empty()) {
            out.push_back(warning_diag("MISSING_PRIMARY_ATTRIBUTE", {sid},
                                       "sourcement '" + sid +
                                           "' has no source groups, so providers are unknown"));
        }
        for (const auto* list : s.attributes.ref_lists()) {
            for (const auto& r : *list) {
                if (!w.has_source(r)) {
                    out.push_back(error_diag("UNRESOLVED_REF", {sid, r.str()},
                                             "attribute of sourcement '" + sid +
                                                 "' references undeclared source"));
                }
            }
        }
    }
}

void check_unit_commitments(Diagnostics& out, const WorldState& w) {
    for (const auto& [consumer, provider] : w.unit_commitments) {
        for (const auto& u : {consumer, provider}) {
            if (!w.has_unit(u)) {
                out.push_back(error_diag("UNRESOLVED_REF", {u.str()},
                                         "unit commitment names undeclared unit"));
            }
        }
        if (consumer == provider) {
            out.push_back(error_diag("UNIT_COMMITMENT_SELF", {consumer.str()},
                                     "unit commitment must designate another unit"));
        }
    }
}

}  // namespace

Diagnostics validate_overlays(const WorldState& state,
                              const std::vector<BusinessConfig>& businesses,
                              const std::vector<ContractConfig>& configs) {
    Diagnostics out;
    UpperLayers up = collect_upper(state, businesses, configs);

    auto fact_token = [&](const std::string& tok) {
        return state.has_unit(UnitId(tok)) || state.has_source(SourceId(tok)) ||
               state.has_source_type(SourceTypeId(tok)) || state.has_theme(ThemeId(tok));
    };

    for (const auto& b : businesses) {
        if (!state.has_unit(b.unit)) {
            out.push_back(error_diag("UNRESOLVED_REF", {b.unit.str()},
                                     "business overlay names undeclared unit"));
        }
        for (const auto* groups : {&b.profit_centers, &b.bleeders}) {
            for (const auto& g : *groups) {
                for (const auto& r : g.refs) {
                    if (fact_token(r)) continue;
                    if (up.contract.count(r)) {
                        out.push_back(error_diag(
                            "STRATIFICATION_VIOLATION", {g.label, r},
                            "business group '" + g.label +
                                "' reaches upward into the contract layer"));
                    } else if (up.business.count(r)) {
                        out.push_back(error_diag("STRATIFICATION_VIOLATION", {g.label, r},
                                                 "business group '" + g.label +
                                                     "' must resolve in the fact layer"));
                    } else {
                        out.push_back(error_diag("UNRESOLVED_REF", {g.label, r},
                                                 "business group reference does not resolve"));
                    }
                }
            }
        }
    }

    for (const auto& c : configs) {
        for (const auto& u : c.scope) {
            if (!state.has_unit(u)) {
                out.push_back(error_diag("UNRESOLVED_REF", {u.str()},
                                         "contract overlay scope names undeclared unit"));
            }
        }
        std::set<std::string> promise_ids;
        for (const auto& p : c.promises) {
            promise_ids.insert(p.id);
            for (const auto& u : {p.from, p.to}) {
                if (!state.has_unit(u)) {
                    out.push_back(error_diag("UNRESOLVED_REF", {p.id, u.str()},
                                             "promise '" + p.id + "' names undeclared unit"));
                }
            }
        }
        for (const auto& a : c.agreements) {
            for (const auto& pid : {a.promise_a, a.promise_b}) {
                if (!promise_ids.count(pid)) {
                    out.push_back(error_diag("UNRESOLVED_REF", {a.id, pid},
                                             "agreement '" + a.id +
                                                 "' pairs an undeclared promise"));
                }
            }
        }
        for (const auto& cid : c.contracts) {
            if (!state.has_contract(cid)) {
                out.push_back(error_diag("UNRESOLVED_REF", {cid.str()},
                                         "contract overlay lists undeclared contract"));
            }
        }
    }
    return out;
}

Diagnostics validate_all(const WorldState& state, const std::vector<BusinessConfig>& businesses,
                         const std::vector<ContractConfig>& configs) {
    Diagnostics out;
    UpperLayers up = collect_upper(state, businesses, configs);
    check_units(out, state);
    check_sources(out, state, up);
    check_dependency_cycles(out, state);
    check_themes(out, state);
    check_uses(out, state);
    check_contracts(out, state);
    check_commitments(out, state);
    check_sourcements(out, state);
    check_unit_commitments(out, state);
    Diagnostics overlay = validate_overlays(state, businesses, configs);
    out.insert(out.end(), overlay.begin(), overlay.end());
    return out;
}

Diagnostics validate_state(const WorldState& state) { return validate_all(state, {}, {}); }

}  // namespace stratos
