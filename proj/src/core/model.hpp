#ifndef STRATOS_CORE_MODEL_HPP
#define STRATOS_CORE_MODEL_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "core/diagnostics.hpp"
#include "core/ids.hpp"

namespace stratos {

using Timestamp = std::int64_t;

// ---------------------------------------------------------------------------
// Fact layer
// ---------------------------------------------------------------------------

struct Unit {
    UnitId id;
    std::string name;
    std::optional<UnitId> parent;  // subunit relation, acyclic
    std::optional<std::string> mission;
};

struct SourceType {
    SourceTypeId id;
    bool singleton = false;  // at most one source of this type per owner
};

struct Source {
    SourceId id;
    SourceTypeId type;
    UnitId owner;  // exactly one owner at any instant
    std::string descriptor;
    std::vector<SourceId> depends_on;  // may be cyclic; closed symmetrically
    // Marks a contract-management function source, excluded when deciding
    // whether a service is fully source committing.
    bool management_function = false;
};

struct Theme {
    ThemeId id;
    UnitId maintainer;
    std::string name;
    std::optional<std::string> cluster;
};

struct UseRelation {
    UnitId user;
    SourceId source;
    ThemeId theme;  // must be maintained by user

    friend bool operator==(const UseRelation& a, const UseRelation& b) {
        return a.user == b.user && a.source == b.source && a.theme == b.theme;
    }
    friend bool operator<(const UseRelation& a, const UseRelation& b) {
        if (a.user != b.user) return a.user < b.user;
        if (a.source != b.source) return a.source < b.source;
        return a.theme < b.theme;
    }
};

// ---------------------------------------------------------------------------
// Contract layer entities kept in the world snapshot (their existence is a
// fact; their descriptive position lives in ContractConfig)
// ---------------------------------------------------------------------------

enum class Compensation { SingleTransaction, TemporallyDivided, ForContractDuration, None };
enum class CommitmentTerms { IntentionallyNonCommitting, Unspecified };

const char* compensation_name(Compensation c);
std::optional<Compensation> compensation_from_name(const std::string& s);
const char* commitment_terms_name(CommitmentTerms t);
std::optional<CommitmentTerms> commitment_terms_from_name(const std::string& s);

struct ServiceContract {
    ContractId id;
    UnitId provider;
    UnitId consumer;
    ThemeId theme;
    Timestamp period_start = 0;
    Timestamp period_end = 0;
    std::string termination_protocol;
    Timestamp notice_interval = 0;
    Compensation compensation = Compensation::None;
    CommitmentTerms intentional_commitment_terms = CommitmentTerms::Unspecified;
};

// Commitment of a unit toward a source it does not own. Commitment to owned
// sources is implicit and never recorded. `origin` is provenance metadata
// ("contract:<id>" or "event:<seq>") and is not required to resolve in the
// current state.
struct SourceCommitment {
    CommitmentId id;
    UnitId committed_unit;
    SourceId source;
    std::string origin;
};

// Deterministic commitment id for a (unit, source) pair; at most one
// commitment per pair exists.
CommitmentId derived_commitment_id(const UnitId& unit, const SourceId& source);

// ---------------------------------------------------------------------------
// Sourcements
// ---------------------------------------------------------------------------

// A group of sources that will not evolve into divergent ownership. The
// stored owner may briefly disagree with member owners inside a transition
// plan; committed states keep them in sync.
struct BasicSourcement {
    UnitId owner;
    std::vector<SourceId> sources;  // sorted, unique, non-empty
};

struct AttributeRecord {
    std::optional<std::string> thematic_operations;
    std::vector<SourceId> location;
    std::vector<SourceId> facilities;
    std::vector<SourceId> operational_staff;
    std::vector<SourceId> managing_staff;
    std::vector<SourceId> contract_management_staff;
    std::vector<SourceId> directing_staff;
    std::optional<std::string> intellectual_property;
    std::optional<std::string> data_knowledge_software;

    bool empty() const;
    std::vector<const std::vector<SourceId>*> ref_lists() const;
    std::vector<std::vector<SourceId>*> ref_lists();
};

struct Sourcement {
    std::string id;
    UnitId principal;
    std::vector<ThemeId> themes;  // non-empty, each maintained by principal
    std::vector<BasicSourcement> basics;
    AttributeRecord attributes;
    // nullopt = stable; value = deadline by which change must happen
    std::optional<Timestamp> unstable_deadline;
    std::vector<std::int64_t> history;  // seqs of events that touched it

    // owners of basics minus the principal
    std::vector<UnitId> providers() const;
};

struct SourcementPortfolio {
    UnitId owner;
    std::vector<std::string> sourcements;  // ids; every member has principal = owner
};

// ---------------------------------------------------------------------------
// Overlays
// ---------------------------------------------------------------------------

// A labelled group of entity references inside a business overlay. Refs are
// raw tokens; validation resolves them against fact-layer families and
// rejects upward (stratification-violating) references.
struct BusinessRefGroup {
    std::string label;
    std::string note;
    std::vector<std::string> refs;
};

struct BusinessConfig {
    UnitId unit;
    std::vector<std::string> operational_options;
    std::string business_category;
    std::vector<BusinessRefGroup> profit_centers;
    std::vector<BusinessRefGroup> bleeders;
    std::vector<std::string> market_acquisition_motives;
};

struct Promise {
    std::string id;
    UnitId from;
    UnitId to;
    std::string text;
};

struct Agreement {
    std::string id;
    std::string promise_a;  // mutually dependent pair of promises
    std::string promise_b;
};

struct ContractConfig {
    std::vector<UnitId> scope;
    std::vector<std::string> general_law;
    std::vector<std::string> rules_of_trade;
    std::vector<std::string> sustainability_charters;
    std::vector<Promise> promises;
    std::vector<Agreement> agreements;
    std::vector<ContractId> contracts;
};

// ---------------------------------------------------------------------------
// World state
// ---------------------------------------------------------------------------

struct WorldState {
    std::map<UnitId, Unit> units;
    std::map<SourceTypeId, SourceType> source_types;
    std::map<SourceId, Source> sources;
    std::map<ThemeId, Theme> themes;
    std::vector<UseRelation> use_relations;  // sorted, unique
    std::map<ContractId, ServiceContract> contracts;
    std::map<CommitmentId, SourceCommitment> commitments;
    std::map<std::string, Sourcement> sourcements;
    // consumer -> designated provider it must return to on follow-up
    std::map<UnitId, UnitId> unit_commitments;
    Timestamp timestamp = 0;

    bool has_unit(const UnitId& u) const { return units.count(u) != 0; }
    bool has_source(const SourceId& s) const { return sources.count(s) != 0; }
    bool has_source_type(const SourceTypeId& t) const { return source_types.count(t) != 0; }
    bool has_theme(const ThemeId& t) const { return themes.count(t) != 0; }
    bool has_contract(const ContractId& c) const { return contracts.count(c) != 0; }

    const Unit& unit(const UnitId& u) const;
    const Source& source(const SourceId& s) const;
    const SourceType& source_type(const SourceTypeId& t) const;
    const Theme& theme(const ThemeId& t) const;
    const ServiceContract& contract(const ContractId& c) const;

    const UnitId& owner_of(const SourceId& s) const { return source(s).owner; }

    void add_use(const UseRelation& ur);
    bool remove_use(const UseRelation& ur);
    bool has_use(const UseRelation& ur) const;

    // commitment lookup by (unit, source); nullptr when absent
    const SourceCommitment* find_commitment(const UnitId& u, const SourceId& s) const;
};

// Sorted convenience views used all over validation and transformations.
std::vector<SourceId> sources_owned_by(const WorldState& w, const UnitId& u);
std::vector<SourceId> sources_of_type(const WorldState& w, const SourceTypeId& t);

// ---------------------------------------------------------------------------
// History
// ---------------------------------------------------------------------------

struct SourceMove {
    SourceId source;
    UnitId from;
    UnitId to;
};

struct EventParams {
    std::vector<SourceMove> moves;
    std::vector<SourceId> created_sources;
    std::vector<SourceId> removed_sources;
    std::optional<ContractId> contract_created;
    std::optional<ContractId> contract_terminated;
    std::vector<CommitmentId> commitments_created;
    std::vector<CommitmentId> commitments_discharged;
    std::optional<ThemeId> theme_moved;
    std::optional<UnitId> theme_from;
    std::optional<UnitId> theme_to;
    std::optional<SourceTypeId> subject_type;
    std::optional<std::string> subject_sourcement;
    std::vector<UnitId> counterparties;
    std::optional<UnitId> prev_provider;
    std::optional<UnitId> new_provider;
    std::optional<bool> mission_tie;
    Compensation compensation = Compensation::None;
};

struct HistoryEvent {
    std::int64_t seq = 0;
    Timestamp time = 0;
    std::string kind;  // transformation kind name, or "edit:<step kind>"
    UnitId actor;
    EventParams params;
    std::string pre_digest;
    std::string post_digest;
};

using HistoryLog = std::vector<HistoryEvent>;

// ---------------------------------------------------------------------------
// Validation and digest
// ---------------------------------------------------------------------------

// Checks every structural invariant of the state. Severity Error marks a
// broken invariant; Warning and Info findings (dependency cycles, divergent
// basics mid-transition, missing primary attributes) do not make the state
// invalid.
Diagnostics validate_state(const WorldState& state);

inline bool state_valid(const WorldState& state) { return !has_errors(validate_state(state)); }

// Deterministic fingerprint over the canonical serialization. Equal states
// (up to collection ordering) yield equal fingerprints. Throws
// Errc::InvalidState when validation reports errors.
std::string state_digest(const WorldState& state);

// Digest of a single sourcement description, used by the pattern round trip.
std::string sourcement_digest(const Sourcement& s);

}  // namespace stratos

#endif
