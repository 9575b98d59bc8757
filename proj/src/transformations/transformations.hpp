#ifndef STRATOS_TRANSFORMATIONS_TRANSFORMATIONS_HPP
#define STRATOS_TRANSFORMATIONS_TRANSFORMATIONS_HPP

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "core/model.hpp"

namespace stratos {

enum class TransformKind {
    Outsource,
    OutsourceOfType,
    Insource,
    Backsource,
    FollowUpOutsource,
    SourceExternalization,
    SourceInternalization,
    ProgressiveOutsource,
    DecomposeSourcement,
    DropSource,
    DevelopSource,
};

const char* transform_kind_name(TransformKind k);
std::optional<TransformKind> transform_kind_from_name(const std::string& s);

// Contract skeleton carried by a transformation that opens a service.
struct ServicePayload {
    ContractId id;
    ThemeId theme;
    Timestamp period_start = 0;
    Timestamp period_end = 0;
    std::string termination_protocol;
    Timestamp notice_interval = 0;
    Compensation compensation = Compensation::ForContractDuration;
    CommitmentTerms intentional_commitment_terms = CommitmentTerms::Unspecified;
};

struct SourcePayload {
    SourceId id;
    SourceTypeId type;
    std::string descriptor;
    std::vector<SourceId> depends_on;
    bool management_function = false;
    std::optional<ThemeId> use_for;
};

// What the transformation acts on. Which members must be set depends on the
// kind; the theme form of Outsource carries both the theme and the sources
// that travel with it.
struct Subject {
    std::vector<SourceId> sources;
    std::optional<SourceTypeId> type;
    std::optional<ThemeId> theme;
    std::optional<std::string> sourcement;
};

struct TransformationSpec {
    TransformKind kind = TransformKind::Outsource;
    UnitId actor;
    std::vector<UnitId> counterparties;
    Subject subject;
    std::optional<ServicePayload> service;
    std::vector<SourceId> commitments_to_create;
    Compensation compensation = Compensation::None;
    std::optional<SourcePayload> source_payload;      // DevelopSource
    std::map<SourceId, UnitId> assignments;           // per-source receiver override
    std::optional<ContractId> prior_contract;         // FollowUpOutsource, ProgressiveOutsource
    std::optional<bool> mission_tie;                  // ProgressiveOutsource attestation
    std::vector<std::vector<SourceId>> partition;     // DecomposeSourcement
};

struct Applied {
    WorldState state;
    HistoryLog log;

    const HistoryEvent& event() const { return log.back(); }
};

// Executes one fundamental transformation. Throws Errc::PreconditionFailed
// with a machine-readable detail code when a per-kind condition is unmet,
// and Errc::UndefinedOperation for a backsource following an outsourcing of
// type. The post state always validates.
// `now`, when given, becomes the post state's logical clock; the pre digest
// is always taken over the state as passed, so the event chain stays intact.
Applied apply(const WorldState& state, const TransformationSpec& spec, const HistoryLog& log,
              std::optional<Timestamp> now = std::nullopt);

// ---------------------------------------------------------------------------
// Delta analysis
// ---------------------------------------------------------------------------

// Candidate readings of an observed before/after pair. Plural whenever the
// delta supports more than one story; drop-plus-external-acquisition is the
// compound reading that makes an apparent outsourcing inconclusive.
enum class ClassifiedKind {
    Outsource,
    OutsourceOfType,
    Insource,
    Backsource,
    FollowUpOutsource,
    SourceExternalization,
    SourceInternalization,
    ProgressiveOutsource,
    DecomposeSourcement,
    DropSource,
    DevelopSource,
    DropSourceExternalAcquisition,
};

const char* classified_kind_name(ClassifiedKind k);
ClassifiedKind to_classified(TransformKind k);

std::set<ClassifiedKind> classify(const WorldState& pre, const WorldState& post,
                                  const UnitId& focus_unit);

enum class CommitmentClass {
    Engaging,
    Preserving,
    PartiallyPreservingPartiallyDischarging,
    FullyDischarging,
};

const char* commitment_class_name(CommitmentClass c);

// The commitment estate of a unit: sources it owns (commitment implicit in
// ownership) plus sources it is explicitly committed to.
std::set<SourceId> commitment_estate(const WorldState& state, const UnitId& u);

CommitmentClass classify_commitments(const WorldState& pre, const WorldState& post,
                                     const UnitId& u);

enum class ServiceCharacteristic {
    FullySourceNonCommittingIntentional,
    FullySourceNonCommittingUnintentional,
    PartiallySourceCommitting,
    FullySourceCommitting,
};

const char* service_characteristic_name(ServiceCharacteristic c);

ServiceCharacteristic service_characteristic(const WorldState& state, const ContractId& contract);

enum class ProvenanceKind {
    DevelopedInsideNeverOutsourced,
    InsourcedFrom,
    FollowUpOutsourcedByThird,
    Backsourced,
    OutsourcedTo,
    FollowUpOutsourcedTo,
    DevelopedInProviderNeverOutsourced,
    DevelopedThenChained,
};

const char* provenance_kind_name(ProvenanceKind k);

struct Provenance {
    ProvenanceKind kind = ProvenanceKind::DevelopedInsideNeverOutsourced;
    std::vector<UnitId> units;  // payload, meaning depends on kind
};

// Answers "where does s come from, seen from u". Throws
// Errc::InconsistentLog when the event chain does not connect to the state.
Provenance provenance(const HistoryLog& log, const WorldState& state, const UnitId& u,
                      const SourceId& s);

}  // namespace stratos

#endif
