#include <algorithm>

#include "core/error.hpp"
#include "relations/relations.hpp"
#include "transformations/transformations.hpp"

namespace stratos {

const char* classified_kind_name(ClassifiedKind k) {
    switch (k) {
        case ClassifiedKind::Outsource: return "outsource";
        case ClassifiedKind::OutsourceOfType: return "outsource_of_type";
        case ClassifiedKind::Insource: return "insource";
        case ClassifiedKind::Backsource: return "backsource";
        case ClassifiedKind::FollowUpOutsource: return "follow_up_outsource";
        case ClassifiedKind::SourceExternalization: return "source_externalization";
        case ClassifiedKind::SourceInternalization: return "source_internalization";
        case ClassifiedKind::ProgressiveOutsource: return "progressive_outsource";
        case ClassifiedKind::DecomposeSourcement: return "decompose_sourcement";
        case ClassifiedKind::DropSource: return "drop_source";
        case ClassifiedKind::DevelopSource: return "develop_source";
        case ClassifiedKind::DropSourceExternalAcquisition:
            return "drop_source_external_acquisition";
    }
    return "outsource";
}

ClassifiedKind to_classified(TransformKind k) {
    switch (k) {
        case TransformKind::Outsource: return ClassifiedKind::Outsource;
        case TransformKind::OutsourceOfType: return ClassifiedKind::OutsourceOfType;
        case TransformKind::Insource: return ClassifiedKind::Insource;
        case TransformKind::Backsource: return ClassifiedKind::Backsource;
        case TransformKind::FollowUpOutsource: return ClassifiedKind::FollowUpOutsource;
        case TransformKind::SourceExternalization: return ClassifiedKind::SourceExternalization;
        case TransformKind::SourceInternalization: return ClassifiedKind::SourceInternalization;
        case TransformKind::ProgressiveOutsource: return ClassifiedKind::ProgressiveOutsource;
        case TransformKind::DecomposeSourcement: return ClassifiedKind::DecomposeSourcement;
        case TransformKind::DropSource: return ClassifiedKind::DropSource;
        case TransformKind::DevelopSource: return ClassifiedKind::DevelopSource;
    }
    return ClassifiedKind::Outsource;
}

namespace {

struct Delta {
    std::vector<SourceId> created;
    std::vector<SourceId> removed;
    std::vector<SourceMove> moves;
    std::vector<ContractId> contracts_added;
    std::vector<ContractId> contracts_removed;
    std::vector<std::pair<UnitId, SourceId>> commitments_added;
    std::vector<std::pair<UnitId, SourceId>> commitments_removed;
    std::vector<ThemeId> themes_moved;
    std::vector<UseRelation> uses_added;
    std::vector<UseRelation> uses_removed;
    std::vector<std::string> sourcements_restructured;

    bool empty() const {
        return created.empty() && removed.empty() && moves.empty() && contracts_added.empty() &&
               contracts_removed.empty() && commitments_added.empty() &&
               commitments_removed.empty() && themes_moved.empty() && uses_added.empty() &&
               uses_removed.empty() && sourcements_restructured.empty();
    }
};

Delta diff(const WorldState& pre, const WorldState& post) {
    Delta d;
    for (const auto& [sid, s] : post.sources) {
        auto it = pre.sources.find(sid);
        if (it == pre.sources.end()) {
            d.created.push_back(sid);
        } else if (!(it->second.owner == s.owner)) {
            d.moves.push_back(SourceMove{sid, it->second.owner, s.owner});
        }
    }
    for (const auto& [sid, s] : pre.sources) {
        if (!post.sources.count(sid)) d.removed.push_back(sid);
    }
    for (const auto& [cid, c] : post.contracts) {
        if (!pre.contracts.count(cid)) d.contracts_added.push_back(cid);
    }
    for (const auto& [cid, c] : pre.contracts) {
        if (!post.contracts.count(cid)) d.contracts_removed.push_back(cid);
    }
    auto pairs = [](const WorldState& w) {
        std::set<std::pair<UnitId, SourceId>> out;
        for (const auto& [cid, cm] : w.commitments) out.insert({cm.committed_unit, cm.source});
        return out;
    };
    auto pre_cm = pairs(pre);
    auto post_cm = pairs(post);
    for (const auto& p : post_cm) {
        if (!pre_cm.count(p)) d.commitments_added.push_back(p);
    }
    for (const auto& p : pre_cm) {
        if (!post_cm.count(p)) d.commitments_removed.push_back(p);
    }
    for (const auto& [tid, t] : post.themes) {
        auto it = pre.themes.find(tid);
        if (it != pre.themes.end() && !(it->second.maintainer == t.maintainer)) {
            d.themes_moved.push_back(tid);
        }
    }
    for (const auto& ur : post.use_relations) {
        if (!pre.has_use(ur)) d.uses_added.push_back(ur);
    }
    for (const auto& ur : pre.use_relations) {
        if (!post.has_use(ur)) d.uses_removed.push_back(ur);
    }
    auto shape = [](const Sourcement& sm) {
        std::set<std::pair<UnitId, std::set<SourceId>>> out;
        for (const auto& b : sm.basics) {
            out.insert({b.owner, {b.sources.begin(), b.sources.end()}});
        }
        return out;
    };
    for (const auto& [smid, sm] : post.sourcements) {
        auto it = pre.sourcements.find(smid);
        if (it != pre.sourcements.end() && shape(it->second) != shape(sm)) {
            d.sourcements_restructured.push_back(smid);
        }
    }
    return d;
}

int clients_for(const WorldState& w, const UnitId& provider, const std::string& theme_name,
                const ContractId* excluded) {
    std::set<UnitId> consumers;
    for (const auto& [cid, c] : w.contracts) {
        if (excluded && cid == *excluded) continue;
        if (!(c.provider == provider)) continue;
        if (w.has_theme(c.theme) && w.theme(c.theme).name == theme_name) {
            consumers.insert(c.consumer);
        }
    }
    return static_cast<int>(consumers.size());
}

}  // namespace

std::set<ClassifiedKind> classify(const WorldState& pre, const WorldState& post,
                                  const UnitId& focus_unit) {
    (void)pre.unit(focus_unit);
    Delta d = diff(pre, post);
    if (d.empty()) {
        throw Error(Errc::NoDelta, "the two states do not differ");
    }
    std::set<ClassifiedKind> out;
    const UnitId& f = focus_unit;

    bool any_from_f = false;
    bool all_from_f = !d.moves.empty();
    bool any_to_f = false;
    bool all_to_f = !d.moves.empty();
    std::set<UnitId> receivers;
    std::set<UnitId> givers;
    for (const auto& m : d.moves) {
        any_from_f |= m.from == f;
        all_from_f &= m.from == f;
        any_to_f |= m.to == f;
        all_to_f &= m.to == f;
        receivers.insert(m.to);
        givers.insert(m.from);
    }

    // outward transfer under a fresh contract consumed by the focus
    if (all_from_f && !d.contracts_added.empty()) {
        for (const auto& cid : d.contracts_added) {
            const auto& c = post.contract(cid);
            if (c.consumer == f && receivers.count(c.provider)) {
                bool used_throughout = true;
                for (const auto& m : d.moves) {
                    bool pre_use = uses(pre, f, m.source);
                    bool post_use = uses(post, f, m.source) ||
                                    (d.themes_moved.size() == 1 &&
                                     uses(post, c.provider, m.source));
                    used_throughout &= pre_use && post_use;
                }
                if (used_throughout) {
                    out.insert(ClassifiedKind::Outsource);
                    // covering every used-and-owned source of one type makes
                    // the stronger, type-level reading available as well
                    std::set<SourceTypeId> types;
                    for (const auto& m : d.moves) types.insert(post.source(m.source).type);
                    if (types.size() == 1) {
                        const SourceTypeId tau = *types.begin();
                        std::set<SourceId> moved_ids;
                        for (const auto& m : d.moves) moved_ids.insert(m.source);
                        bool covers = true;
                        for (const auto& s : used_sources_of_type(pre, f, tau)) {
                            if (pre.owner_of(s) == f) covers &= moved_ids.count(s) != 0;
                        }
                        if (covers && type_status(post, f, tau).non_selfsourcing_type) {
                            out.insert(ClassifiedKind::OutsourceOfType);
                        }
                    }
                }
            }
        }
    }

    // inward transfer under a fresh contract provided by the focus
    if (all_to_f && givers.size() == 1 && !d.contracts_added.empty()) {
        for (const auto& cid : d.contracts_added) {
            const auto& c = post.contract(cid);
            if (c.provider == f && c.consumer == *givers.begin()) {
                out.insert(ClassifiedKind::Insource);
            }
        }
    }

    // transfers without any new contract
    if (!d.moves.empty() && d.contracts_added.empty() && d.created.empty() && d.removed.empty()) {
        if (all_from_f && receivers.size() == 1) {
            bool use_dropped = true;
            for (const auto& m : d.moves) use_dropped &= !uses(post, f, m.source);
            if (use_dropped) out.insert(ClassifiedKind::SourceExternalization);
        }
        if (all_to_f && givers.size() == 1) {
            bool giver_let_go = true;
            for (const auto& m : d.moves) giver_let_go &= !uses(post, *givers.begin(), m.source);
            if (giver_let_go) out.insert(ClassifiedKind::SourceInternalization);
            bool used_throughout = true;
            for (const auto& m : d.moves) {
                used_throughout &= uses(pre, f, m.source) && uses(post, f, m.source);
            }
            if (used_throughout) out.insert(ClassifiedKind::Backsource);
        }
    }

    // provider swap on a standing service
    for (const auto& gone : d.contracts_removed) {
        const auto& old_c = pre.contract(gone);
        if (!(old_c.consumer == f)) continue;
        for (const auto& cid : d.contracts_added) {
            const auto& new_c = post.contract(cid);
            if (!(new_c.consumer == f) || new_c.provider == old_c.provider) continue;
            if (!(new_c.theme == old_c.theme)) continue;
            bool moves_fit = true;
            for (const auto& m : d.moves) {
                moves_fit &= m.from == old_c.provider && m.to == new_c.provider;
            }
            if (!moves_fit) continue;
            out.insert(ClassifiedKind::FollowUpOutsource);
            const std::string name = pre.theme(old_c.theme).name;
            if (clients_for(pre, old_c.provider, name, &gone) == 0 &&
                clients_for(pre, new_c.provider, name, nullptr) > 0) {
                out.insert(ClassifiedKind::ProgressiveOutsource);
            }
        }
    }

    if (!d.created.empty() && d.removed.empty() && d.moves.empty()) {
        bool mine = true;
        for (const auto& s : d.created) mine &= post.owner_of(s) == f;
        if (mine) out.insert(ClassifiedKind::DevelopSource);
    }
    if (!d.removed.empty() && d.created.empty() && d.moves.empty()) {
        bool mine = true;
        for (const auto& s : d.removed) mine &= pre.owner_of(s) == f;
        if (mine) out.insert(ClassifiedKind::DropSource);
    }

    if (!d.sourcements_restructured.empty() && d.moves.empty() && d.created.empty() &&
        d.removed.empty() && d.contracts_added.empty() && d.contracts_removed.empty()) {
        for (const auto& smid : d.sourcements_restructured) {
            if (post.sourcements.at(smid).principal == f) {
                out.insert(ClassifiedKind::DecomposeSourcement);
                break;
            }
        }
    }

    // an owned-and-used source vanished while a same-typed foreign source
    // entered the focus's use: transfer-and-relabel cannot be told apart
    // from drop-plus-acquisition
    for (const auto& gone_s : d.removed) {
        const Source& old_src = pre.sources.at(gone_s);
        if (!(old_src.owner == f) || !uses(pre, f, gone_s)) continue;
        for (const auto& ur : d.uses_added) {
            if (!(ur.user == f) || !post.has_source(ur.source)) continue;
            const Source& new_src = post.sources.at(ur.source);
            if (!(new_src.type == old_src.type) || new_src.owner == f) continue;
            out.insert(ClassifiedKind::DropSourceExternalAcquisition);
            for (const auto& cid : d.contracts_added) {
                const auto& c = post.contract(cid);
                if (c.consumer == f && c.provider == new_src.owner) {
                    out.insert(ClassifiedKind::Outsource);
                    auto st = type_status(post, f, old_src.type);
                    bool others_remain = false;
                    for (const auto& [sid, src] : post.sources) {
                        others_remain |= src.type == old_src.type && src.owner == f &&
                                         uses(post, f, sid);
                    }
                    if (st.non_selfsourcing_type && !others_remain) {
                        out.insert(ClassifiedKind::OutsourceOfType);
                    }
                }
            }
        }
    }

    return out;
}

const char* commitment_class_name(CommitmentClass c) {
    switch (c) {
        case CommitmentClass::Engaging: return "engaging";
        case CommitmentClass::Preserving: return "preserving";
        case CommitmentClass::PartiallyPreservingPartiallyDischarging:
            return "partially_preserving_partially_discharging";
        case CommitmentClass::FullyDischarging: return "fully_discharging";
    }
    return "preserving";
}

std::set<SourceId> commitment_estate(const WorldState& state, const UnitId& u) {
    std::set<SourceId> out;
    for (const auto& [sid, s] : state.sources) {
        if (s.owner == u) out.insert(sid);
    }
    for (const auto& [cid, cm] : state.commitments) {
        if (cm.committed_unit == u) out.insert(cm.source);
    }
    return out;
}

CommitmentClass classify_commitments(const WorldState& pre, const WorldState& post,
                                     const UnitId& u) {
    (void)pre.unit(u);
    (void)post.unit(u);
    auto before = commitment_estate(pre, u);
    auto after = commitment_estate(post, u);
    bool added = false;
    for (const auto& s : after) added |= !before.count(s);
    bool removed = false;
    for (const auto& s : before) removed |= !after.count(s);
    if (added) return CommitmentClass::Engaging;
    if (!removed) return CommitmentClass::Preserving;
    if (after.empty()) return CommitmentClass::FullyDischarging;
    return CommitmentClass::PartiallyPreservingPartiallyDischarging;
}

const char* service_characteristic_name(ServiceCharacteristic c) {
    switch (c) {
        case ServiceCharacteristic::FullySourceNonCommittingIntentional:
            return "fully_source_non_committing_intentional";
        case ServiceCharacteristic::FullySourceNonCommittingUnintentional:
            return "fully_source_non_committing_unintentional";
        case ServiceCharacteristic::PartiallySourceCommitting:
            return "partially_source_committing";
        case ServiceCharacteristic::FullySourceCommitting: return "fully_source_committing";
    }
    return "partially_source_committing";
}

ServiceCharacteristic service_characteristic(const WorldState& state, const ContractId& contract) {
    const ServiceContract& c = state.contract(contract);
    // provider sources deployed for this service = owned by the provider and
    // used for the contract's theme
    std::set<SourceId> deployed;
    for (const auto& ur : state.use_relations) {
        if (!(ur.theme == c.theme) || !state.has_source(ur.source)) continue;
        if (state.owner_of(ur.source) == c.provider) deployed.insert(ur.source);
    }
    std::set<SourceId> committed;
    for (const auto& s : deployed) {
        if (state.find_commitment(c.consumer, s)) committed.insert(s);
    }
    if (committed.empty()) {
        return c.intentional_commitment_terms == CommitmentTerms::IntentionallyNonCommitting
                   ? ServiceCharacteristic::FullySourceNonCommittingIntentional
                   : ServiceCharacteristic::FullySourceNonCommittingUnintentional;
    }
    // the contract management function does not count against "fully"
    bool fully = true;
    for (const auto& s : deployed) {
        if (state.source(s).management_function) continue;
        fully &= committed.count(s) != 0;
    }
    return fully ? ServiceCharacteristic::FullySourceCommitting
                 : ServiceCharacteristic::PartiallySourceCommitting;
}

const char* provenance_kind_name(ProvenanceKind k) {
    switch (k) {
        case ProvenanceKind::DevelopedInsideNeverOutsourced:
            return "developed_inside_never_outsourced";
        case ProvenanceKind::InsourcedFrom: return "insourced_from";
        case ProvenanceKind::FollowUpOutsourcedByThird: return "follow_up_outsourced_by_third";
        case ProvenanceKind::Backsourced: return "backsourced";
        case ProvenanceKind::OutsourcedTo: return "outsourced_to";
        case ProvenanceKind::FollowUpOutsourcedTo: return "follow_up_outsourced_to";
        case ProvenanceKind::DevelopedInProviderNeverOutsourced:
            return "developed_in_provider_never_outsourced";
        case ProvenanceKind::DevelopedThenChained: return "developed_then_chained";
    }
    return "developed_inside_never_outsourced";
}

Provenance provenance(const HistoryLog& log, const WorldState& state, const UnitId& u,
                      const SourceId& s) {
    (void)state.unit(u);
    (void)state.source(s);
    for (std::size_t i = 0; i < log.size(); ++i) {
        if (i > 0 && (log[i].pre_digest != log[i - 1].post_digest ||
                      log[i].seq <= log[i - 1].seq)) {
            throw Error(Errc::InconsistentLog, "event chain broken at seq " +
                                                   std::to_string(log[i].seq));
        }
    }
    if (!log.empty() && log.back().post_digest != state_digest(state)) {
        throw Error(Errc::InconsistentLog, "log does not end in the given state");
    }

    const HistoryEvent* last = nullptr;
    const SourceMove* last_move = nullptr;
    for (auto it = log.rbegin(); it != log.rend() && !last; ++it) {
        for (const auto& m : it->params.moves) {
            if (m.source == s) {
                last = &*it;
                last_move = &m;
                break;
            }
        }
        if (!last) {
            for (const auto& cs : it->params.created_sources) {
                if (cs == s) last = &*it;
            }
        }
    }

    const UnitId owner = state.owner_of(s);
    auto is_outsourcing = [](const std::string& kind) {
        return kind == "outsource" || kind == "outsource_of_type";
    };
    auto is_follow_up = [](const std::string& kind) {
        return kind == "follow_up_outsource" || kind == "progressive_outsource";
    };

    // the whole ownership trail, oldest first, for the chained fallback
    auto chain_of = [&]() {
        std::vector<UnitId> chain;
        for (const auto& e : log) {
            for (const auto& m : e.params.moves) {
                if (m.source == s) {
                    if (chain.empty()) chain.push_back(m.from);
                    chain.push_back(m.to);
                }
            }
            for (const auto& cs : e.params.created_sources) {
                if (cs == s && chain.empty()) chain.push_back(e.actor);
            }
        }
        if (chain.empty()) chain.push_back(owner);
        return chain;
    };

    if (owner == u) {
        if (!last || (!last_move && last->kind == "develop_source")) {
            return {ProvenanceKind::DevelopedInsideNeverOutsourced, {}};
        }
        if (!last_move) return {ProvenanceKind::DevelopedInsideNeverOutsourced, {}};
        if (last->kind == "backsource" && last->actor == u) {
            return {ProvenanceKind::Backsourced, {}};
        }
        if (last_move->to == u) {
            if (is_follow_up(last->kind)) {
                return {ProvenanceKind::FollowUpOutsourcedByThird,
                        {last->actor, last_move->from}};
            }
            // received through an insourcing, an internalization, or the
            // giving side's outsourcing: all read as acquisition
            return {ProvenanceKind::InsourcedFrom, {last_move->from}};
        }
        return {ProvenanceKind::DevelopedThenChained, chain_of()};
    }

    if (last && last_move) {
        if (is_outsourcing(last->kind) && last->actor == u && last_move->to == owner) {
            return {ProvenanceKind::OutsourcedTo, {owner}};
        }
        if (is_follow_up(last->kind) && last->actor == u && last_move->to == owner) {
            return {ProvenanceKind::FollowUpOutsourcedTo, {last_move->from, last_move->to}};
        }
        return {ProvenanceKind::DevelopedThenChained, chain_of()};
    }
    return {ProvenanceKind::DevelopedInProviderNeverOutsourced, {owner}};
}

}  // namespace stratos
