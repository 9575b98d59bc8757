#ifndef STRATOS_TRANSITIONS_TRANSITIONS_HPP
#define STRATOS_TRANSITIONS_TRANSITIONS_HPP

#include <optional>
#include <string>
#include <vector>

#include "core/diagnostics.hpp"
#include "core/json_io.hpp"
#include "core/model.hpp"
#include "transformations/transformations.hpp"

namespace stratos {

enum class StepKind {
    TransferOwnership,
    CreateContract,
    TerminateContract,
    CreateCommitment,
    DischargeCommitment,
    CreateSource,
    RemoveSource,
    AddUseRelation,
    RemoveUseRelation,
    TransferTheme,
    SplitBasic,
};

const char* step_kind_name(StepKind k);
std::optional<StepKind> step_kind_from_name(const std::string& s);

// One indivisible action inside a transition. Which fields carry meaning
// depends on the kind; lane groups steps that belong to the same dependency
// cluster of sources, lane 0 holds the cluster-independent bookkeeping.
struct PrimitiveStep {
    StepKind kind = StepKind::TransferOwnership;
    int lane = 0;
    SourceId source;                                // transfer, commitment, remove
    UnitId from;                                    // transfer ownership or theme
    UnitId to;
    UnitId unit;                                    // commitment holder, use relations
    std::optional<ServicePayload> contract;         // create contract
    ContractId contract_id;                         // terminate contract
    CommitmentId commitment_id;                     // discharge commitment
    std::string origin;                             // create commitment
    std::optional<SourcePayload> source_payload;    // create source
    UnitId owner;                                   // create source
    ThemeId theme;                                  // use relations, transfer theme
    std::string sourcement;                         // split basic
    std::vector<std::vector<SourceId>> partition;   // split basic
    std::string note;                               // free-text annotation
};

struct TransitionPlan {
    std::vector<PrimitiveStep> steps;
    std::string declared_pre;    // state fingerprint; empty = unchecked
    std::string declared_post;
    std::vector<std::string> annotations;
};

// Builds a step sequence whose execution reproduces what apply would do for
// the same spec. Greedy order: discharges, contract terminations, use
// removals, transfers, regroupings, source creation and removal, contract
// creation, theme handover, use additions, commitment creation. Propagates
// every precondition failure of apply unchanged.
TransitionPlan plan(const WorldState& state, const TransformationSpec& spec,
                    const HistoryLog& log = {});

// Runs the plan step by step. Returns the full progression: the given state
// first, then one entry per executed step, the last being the final state.
// Throws Errc::PreMismatch when a declared fingerprint disagrees and
// Errc::StepFailed with the failing index when a step does not apply or
// leaves the state invalid.
std::vector<WorldState> apply_plan(const WorldState& state, const TransitionPlan& plan);

// True iff the plan runs to completion on the state and lands, by digest, on
// the state apply produces for the same transformation. Never throws;
// failures are reported through the optional diagnostics sink.
bool verify_plan(const WorldState& state, const TransitionPlan& plan,
                 const TransformationSpec& spec, const HistoryLog& log = {},
                 Diagnostics* diagnostics = nullptr);

Json step_to_json(const PrimitiveStep& st);
PrimitiveStep step_from_json(const Json& j);
Json plan_to_json(const TransitionPlan& p);
TransitionPlan plan_from_json(const Json& j);

}  // namespace stratos

#endif
