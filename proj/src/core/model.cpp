#include "core/model.hpp"

#include <sstream>

#include "core/error.hpp"

namespace stratos {

const char* compensation_name(Compensation c) {
    switch (c) {
        case Compensation::SingleTransaction: return "single_transaction";
        case Compensation::TemporallyDivided: return "temporally_divided";
        case Compensation::ForContractDuration: return "for_contract_duration";
        case Compensation::None: return "none";
    }
    return "none";
}

std::optional<Compensation> compensation_from_name(const std::string& s) {
    if (s == "single_transaction") return Compensation::SingleTransaction;
    if (s == "temporally_divided") return Compensation::TemporallyDivided;
    if (s == "for_contract_duration") return Compensation::ForContractDuration;
    if (s == "none") return Compensation::None;
    return std::nullopt;
}

const char* commitment_terms_name(CommitmentTerms t) {
    switch (t) {
        case CommitmentTerms::IntentionallyNonCommitting: return "intentionally_non_committing";
        case CommitmentTerms::Unspecified: return "unspecified";
    }
    return "unspecified";
}

std::optional<CommitmentTerms> commitment_terms_from_name(const std::string& s) {
    if (s == "intentionally_non_committing") return CommitmentTerms::IntentionallyNonCommitting;
    if (s == "unspecified") return CommitmentTerms::Unspecified;
    return std::nullopt;
}

CommitmentId derived_commitment_id(const UnitId& unit, const SourceId& source) {
    return CommitmentId("cm." + unit.str() + "." + source.str());
}

bool AttributeRecord::empty() const {
    return !thematic_operations && location.empty() && facilities.empty() &&
           operational_staff.empty() && managing_staff.empty() &&
           contract_management_staff.empty() && directing_staff.empty() &&
           !intellectual_property && !data_knowledge_software;
}

std::vector<const std::vector<SourceId>*> AttributeRecord::ref_lists() const {
    return {&location, &facilities, &operational_staff, &managing_staff,
            &contract_management_staff, &directing_staff};
}

std::vector<std::vector<SourceId>*> AttributeRecord::ref_lists() {
    return {&location, &facilities, &operational_staff, &managing_staff,
            &contract_management_staff, &directing_staff};
}

std::vector<UnitId> Sourcement::providers() const {
    std::set<UnitId> out;
    for (const auto& b : basics) {
        if (!(b.owner == principal)) out.insert(b.owner);
    }
    return {out.begin(), out.end()};
}

const Unit& WorldState::unit(const UnitId& u) const {
    auto it = units.find(u);
    if (it == units.end()) throw_unknown("unit", u.str());
    return it->second;
}

const Source& WorldState::source(const SourceId& s) const {
    auto it = sources.find(s);
    if (it == sources.end()) throw_unknown("source", s.str());
    return it->second;
}

const SourceType& WorldState::source_type(const SourceTypeId& t) const {
    auto it = source_types.find(t);
    if (it == source_types.end()) throw_unknown("source_type", t.str());
    return it->second;
}

const Theme& WorldState::theme(const ThemeId& t) const {
    auto it = themes.find(t);
    if (it == themes.end()) throw_unknown("theme", t.str());
    return it->second;
}

const ServiceContract& WorldState::contract(const ContractId& c) const {
    auto it = contracts.find(c);
    if (it == contracts.end()) throw_unknown("contract", c.str());
    return it->second;
}

void WorldState::add_use(const UseRelation& ur) {
    auto it = std::lower_bound(use_relations.begin(), use_relations.end(), ur);
    if (it != use_relations.end() && *it == ur) return;
    use_relations.insert(it, ur);
}

bool WorldState::remove_use(const UseRelation& ur) {
    auto it = std::lower_bound(use_relations.begin(), use_relations.end(), ur);
    if (it == use_relations.end() || !(*it == ur)) return false;
    use_relations.erase(it);
    return true;
}

bool WorldState::has_use(const UseRelation& ur) const {
    auto it = std::lower_bound(use_relations.begin(), use_relations.end(), ur);
    return it != use_relations.end() && *it == ur;
}

const SourceCommitment* WorldState::find_commitment(const UnitId& u, const SourceId& s) const {
    for (const auto& [id, cm] : commitments) {
        if (cm.committed_unit == u && cm.source == s) return &cm;
    }
    return nullptr;
}

std::vector<SourceId> sources_owned_by(const WorldState& w, const UnitId& u) {
    std::vector<SourceId> out;
    for (const auto& [id, src] : w.sources) {
        if (src.owner == u) out.push_back(id);
    }
    return out;
}

std::vector<SourceId> sources_of_type(const WorldState& w, const SourceTypeId& t) {
    std::vector<SourceId> out;
    for (const auto& [id, src] : w.sources) {
        if (src.type == t) out.push_back(id);
    }
    return out;
}

}  // namespace stratos
