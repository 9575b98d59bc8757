#include "transformations/transformations.hpp"

#include <algorithm>

#include "core/error.hpp"
#include "relations/relations.hpp"

namespace stratos {

const char* transform_kind_name(TransformKind k) {
    switch (k) {
        case TransformKind::Outsource: return "outsource";
        case TransformKind::OutsourceOfType: return "outsource_of_type";
        case TransformKind::Insource: return "insource";
        case TransformKind::Backsource: return "backsource";
        case TransformKind::FollowUpOutsource: return "follow_up_outsource";
        case TransformKind::SourceExternalization: return "source_externalization";
        case TransformKind::SourceInternalization: return "source_internalization";
        case TransformKind::ProgressiveOutsource: return "progressive_outsource";
        case TransformKind::DecomposeSourcement: return "decompose_sourcement";
        case TransformKind::DropSource: return "drop_source";
        case TransformKind::DevelopSource: return "develop_source";
    }
    return "outsource";
}

std::optional<TransformKind> transform_kind_from_name(const std::string& s) {
    for (auto k : {TransformKind::Outsource, TransformKind::OutsourceOfType, TransformKind::Insource,
                   TransformKind::Backsource, TransformKind::FollowUpOutsource,
                   TransformKind::SourceExternalization, TransformKind::SourceInternalization,
                   TransformKind::ProgressiveOutsource, TransformKind::DecomposeSourcement,
                   TransformKind::DropSource, TransformKind::DevelopSource}) {
        if (s == transform_kind_name(k)) return k;
    }
    return std::nullopt;
}

namespace {

[[noreturn]] void fail(const std::string& detail, const std::string& msg) {
    throw Error(Errc::PreconditionFailed, detail, msg);
}

struct Builder {
    const WorldState& pre;
    WorldState post;
    EventParams params;

    explicit Builder(const WorldState& s) : pre(s), post(s) {}

    // Transfers must respect declared basic groups: a group either moves as
    // a whole to one receiver or stays put. Singleton ownership is checked
    // up front so the engine fails cleanly instead of producing an invalid
    // state.
    void check_transfer(const std::map<SourceId, UnitId>& targets) {
        for (const auto& [smid, sm] : post.sourcements) {
            for (const auto& b : sm.basics) {
                std::size_t inside = 0;
                std::set<UnitId> receivers;
                for (const auto& m : b.sources) {
                    auto it = targets.find(m);
                    if (it != targets.end()) {
                        ++inside;
                        receivers.insert(it->second);
                    }
                }
                if (inside != 0 && (inside != b.sources.size() || receivers.size() != 1)) {
                    fail("BASIC_SPLIT_REQUIRED",
                         "transfer would tear basic group apart in sourcement '" + smid +
                             "'; decompose it first");
                }
            }
        }
        // singleton rule on the receiving side
        for (const auto& [sid, target] : targets) {
            const auto& type = post.source(sid).type;
            if (!post.source_type(type).singleton) continue;
            for (const auto& [oid, other] : post.sources) {
                if (oid == sid) continue;
                bool will_own = targets.count(oid) ? targets.at(oid) == target
                                                  : other.owner == target;
                if (will_own && other.type == type) {
                    fail("SINGLETON_VIOLATION", "receiver '" + target.str() +
                                                    "' would own two sources of singleton type '" +
                                                    type.str() + "'");
                }
            }
        }
    }

    void transfer(const std::map<SourceId, UnitId>& targets) {
        check_transfer(targets);
        for (const auto& [sid, target] : targets) {
            UnitId from = post.source(sid).owner;
            post.sources.at(sid).owner = target;
            params.moves.push_back(SourceMove{sid, from, target});
        }
        for (auto& [smid, sm] : post.sourcements) {
            for (auto& b : sm.basics) {
                if (!b.sources.empty() && targets.count(b.sources.front())) {
                    b.owner = targets.at(b.sources.front());
                }
            }
        }
        // a commitment never outlives becoming the owner
        std::vector<CommitmentId> gone;
        for (const auto& [cid, cm] : post.commitments) {
            auto it = targets.find(cm.source);
            if (it != targets.end() && it->second == cm.committed_unit) gone.push_back(cid);
        }
        for (const auto& cid : gone) {
            post.commitments.erase(cid);
            params.commitments_discharged.push_back(cid);
        }
    }

    void create_contract(const ServicePayload& p, const UnitId& provider, const UnitId& consumer) {
        if (post.has_contract(p.id)) {
            fail("DUPLICATE_ID", "contract id '" + p.id.str() + "' already declared");
        }
        if (!post.has_theme(p.theme)) {
            fail("UNKNOWN_THEME", "service theme '" + p.theme.str() + "' does not resolve");
        }
        ServiceContract c;
        c.id = p.id;
        c.provider = provider;
        c.consumer = consumer;
        c.theme = p.theme;
        c.period_start = p.period_start;
        c.period_end = p.period_end;
        c.termination_protocol = p.termination_protocol;
        c.notice_interval = p.notice_interval;
        c.compensation = p.compensation;
        c.intentional_commitment_terms = p.intentional_commitment_terms;
        post.contracts.emplace(c.id, c);
        params.contract_created = c.id;
    }

    void create_commitments(const UnitId& unit, const std::vector<SourceId>& sources,
                            const std::string& origin) {
        for (const auto& s : sources) {
            if (post.find_commitment(unit, s)) {
                fail("DUPLICATE_COMMITMENT", "unit '" + unit.str() +
                                                 "' is already committed to source '" + s.str() +
                                                 "'");
            }
            SourceCommitment cm;
            cm.id = derived_commitment_id(unit, s);
            cm.committed_unit = unit;
            cm.source = s;
            cm.origin = origin;
            post.commitments.emplace(cm.id, cm);
            params.commitments_created.push_back(cm.id);
        }
    }

    void discharge_commitments(const UnitId& unit, const std::set<SourceId>& sources) {
        std::vector<CommitmentId> gone;
        for (const auto& [cid, cm] : post.commitments) {
            if (cm.committed_unit == unit && sources.count(cm.source)) gone.push_back(cid);
        }
        for (const auto& cid : gone) {
            post.commitments.erase(cid);
            params.commitments_discharged.push_back(cid);
        }
    }

    void terminate_contract(const ContractId& id) {
        if (post.contracts.erase(id)) params.contract_terminated = id;
    }

    void remove_uses_of(const UnitId& unit, const std::set<SourceId>& sources) {
        auto& urs = post.use_relations;
        urs.erase(std::remove_if(urs.begin(), urs.end(),
                                 [&](const UseRelation& ur) {
                                     return ur.user == unit && sources.count(ur.source);
                                 }),
                  urs.end());
    }

    void touch_sourcements(const std::set<SourceId>& sources, std::int64_t seq) {
        for (auto& [smid, sm] : post.sourcements) {
            bool hit = false;
            for (const auto& b : sm.basics) {
                for (const auto& m : b.sources) hit |= sources.count(m) != 0;
            }
            if (hit) sm.history.push_back(seq);
        }
    }
};

void require_actor(const WorldState& state, const TransformationSpec& spec) {
    (void)state.unit(spec.actor);
    for (const auto& cp : spec.counterparties) {
        (void)state.unit(cp);
        if (cp == spec.actor) {
            fail("COUNTERPARTY_IS_ACTOR", "unit '" + cp.str() + "' cannot face itself");
        }
    }
    std::set<UnitId> uniq(spec.counterparties.begin(), spec.counterparties.end());
    if (uniq.size() != spec.counterparties.size()) {
        fail("DUPLICATE_COUNTERPARTY", "counterparty listed twice");
    }
    bool needs_cp = spec.kind != TransformKind::DropSource &&
                    spec.kind != TransformKind::DevelopSource &&
                    spec.kind != TransformKind::DecomposeSourcement;
    if (needs_cp && spec.counterparties.empty()) {
        fail("COUNTERPARTY_REQUIRED",
             std::string(transform_kind_name(spec.kind)) + " needs at least one counterparty");
    }
    if (!needs_cp && !spec.counterparties.empty()) {
        fail("COUNTERPARTY_FORBIDDEN",
             std::string(transform_kind_name(spec.kind)) + " admits no counterparty");
    }
}

std::map<SourceId, UnitId> targets_for(const TransformationSpec& spec,
                                       const std::vector<SourceId>& moved) {
    std::map<SourceId, UnitId> targets;
    for (const auto& s : moved) {
        auto it = spec.assignments.find(s);
        UnitId t = it != spec.assignments.end() ? it->second : spec.counterparties.front();
        if (std::find(spec.counterparties.begin(), spec.counterparties.end(), t) ==
            spec.counterparties.end()) {
            fail("BAD_ASSIGNMENT",
                 "source '" + s.str() + "' assigned to a unit outside the counterparties");
        }
        targets.emplace(s, t);
    }
    for (const auto& [s, t] : spec.assignments) {
        if (!targets.count(s)) {
            fail("BAD_ASSIGNMENT", "assignment for source '" + s.str() +
                                       "' which is not part of the subject");
        }
    }
    return targets;
}

void check_commitment_scope(const TransformationSpec& spec, const std::vector<SourceId>& moved) {
    for (const auto& s : spec.commitments_to_create) {
        if (std::find(moved.begin(), moved.end(), s) == moved.end()) {
            fail("COMMITMENT_OUTSIDE_SUBJECT",
                 "commitment requested for '" + s.str() + "' which does not change hands");
        }
    }
}

// most recent event whose parameters involve s, or nullptr
const HistoryEvent* latest_event_involving(const HistoryLog& log, const SourceId& s) {
    for (auto it = log.rbegin(); it != log.rend(); ++it) {
        for (const auto& m : it->params.moves) {
            if (m.source == s) return &*it;
        }
        for (const auto& c : it->params.created_sources) {
            if (c == s) return &*it;
        }
    }
    return nullptr;
}

const ServiceContract& resolve_prior_contract(const WorldState& state,
                                              const TransformationSpec& spec) {
    if (spec.prior_contract) {
        if (!state.has_contract(*spec.prior_contract)) {
            fail("PRIOR_CONTRACT_REQUIRED",
                 "prior contract '" + spec.prior_contract->str() + "' is not active");
        }
        const auto& c = state.contract(*spec.prior_contract);
        if (!(c.consumer == spec.actor)) {
            fail("PRIOR_CONTRACT_REQUIRED",
                 "prior contract '" + c.id.str() + "' is not consumed by the actor");
        }
        return c;
    }
    const ServiceContract* found = nullptr;
    for (const auto& [cid, c] : state.contracts) {
        if (!(c.consumer == spec.actor)) continue;
        if (found) {
            fail("PRIOR_CONTRACT_REQUIRED",
                 "actor consumes several contracts; name the one to follow up");
        }
        found = &c;
    }
    if (!found) {
        fail("PRIOR_CONTRACT_REQUIRED", "actor consumes no active contract");
    }
    return *found;
}

int distinct_clients(const WorldState& state, const UnitId& provider,
                     const std::string& theme_name, const ContractId* excluded) {
    std::set<UnitId> consumers;
    for (const auto& [cid, c] : state.contracts) {
        if (excluded && cid == *excluded) continue;
        if (!(c.provider == provider)) continue;
        if (state.has_theme(c.theme) && state.theme(c.theme).name == theme_name) {
            consumers.insert(c.consumer);
        }
    }
    return static_cast<int>(consumers.size());
}

void apply_outsource(Builder& b, const TransformationSpec& spec) {
    const auto& w = b.pre;
    if (!spec.service) fail("SERVICE_REQUIRED", "outsourcing opens a service contract");
    std::vector<SourceId> moved = spec.subject.sources;

    if (spec.subject.theme) {
        // theme form: the theme itself changes maintainer and the listed
        // sources travel with it
        const ThemeId& th = *spec.subject.theme;
        (void)w.theme(th);
        if (!(w.theme(th).maintainer == spec.actor)) {
            fail("ACTOR_NOT_MAINTAINER", "actor does not maintain theme '" + th.str() + "'");
        }
        std::set<SourceId> listed(moved.begin(), moved.end());
        for (const auto& ur : w.use_relations) {
            if (ur.user == spec.actor && ur.theme == th && !listed.count(ur.source)) {
                fail("THEME_USES_NOT_COVERED",
                     "source '" + ur.source.str() + "' serves the theme but is not in the subject");
            }
        }
        for (const auto& [smid, sm] : w.sourcements) {
            if (sm.principal == spec.actor &&
                std::find(sm.themes.begin(), sm.themes.end(), th) != sm.themes.end()) {
                fail("SOURCEMENT_BLOCKS_THEME_MOVE",
                     "sourcement '" + smid + "' still lists the theme; retire it first");
            }
        }
    } else if (moved.empty()) {
        fail("SUBJECT_REQUIRED", "outsource needs sources or a theme");
    }

    for (const auto& s : moved) {
        if (!(w.owner_of(s) == spec.actor)) {
            fail("ACTOR_NOT_OWNER", "actor does not own source '" + s.str() + "'");
        }
        if (!uses(w, spec.actor, s)) {
            fail("ACTOR_NOT_USER", "actor does not use source '" + s.str() + "'");
        }
    }
    check_commitment_scope(spec, moved);

    auto targets = targets_for(spec, moved);
    b.transfer(targets);
    UnitId provider = spec.counterparties.front();
    b.create_contract(*spec.service, provider, spec.actor);
    b.create_commitments(spec.actor, spec.commitments_to_create,
                         "contract:" + spec.service->id.str());

    if (spec.subject.theme) {
        const ThemeId& th = *spec.subject.theme;
        b.post.themes.at(th).maintainer = provider;
        for (auto& ur : b.post.use_relations) {
            if (ur.user == spec.actor && ur.theme == th) ur.user = provider;
        }
        std::sort(b.post.use_relations.begin(), b.post.use_relations.end());
        b.params.theme_moved = th;
        b.params.theme_from = spec.actor;
        b.params.theme_to = provider;
    }
}

void apply_outsource_of_type(Builder& b, const TransformationSpec& spec) {
    const auto& w = b.pre;
    if (!spec.service) fail("SERVICE_REQUIRED", "outsourcing opens a service contract");
    if (!spec.subject.type) fail("SUBJECT_REQUIRED", "outsource of type needs a type subject");
    const SourceTypeId& tau = *spec.subject.type;
    auto used = used_sources_of_type(w, spec.actor, tau);
    if (used.empty()) {
        fail("NOT_USING_TYPE", "actor uses no source of type '" + tau.str() + "'");
    }
    std::vector<SourceId> moved;
    for (const auto& s : used) {
        if (w.owner_of(s) == spec.actor) moved.push_back(s);
    }
    if (moved.empty()) {
        fail("NOTHING_TO_MOVE", "actor owns no used source of type '" + tau.str() + "'");
    }
    check_commitment_scope(spec, moved);
    auto targets = targets_for(spec, moved);
    b.transfer(targets);
    b.create_contract(*spec.service, spec.counterparties.front(), spec.actor);
    b.create_commitments(spec.actor, spec.commitments_to_create,
                         "contract:" + spec.service->id.str());
    b.params.subject_type = tau;

    auto st = type_status(b.post, spec.actor, tau);
    if (!st.non_selfsourcing_type) {
        fail("POST_NOT_NON_SELFSOURCING",
             "actor would remain selfsourcing for type '" + tau.str() + "'");
    }
}

void apply_insource(Builder& b, const TransformationSpec& spec) {
    const auto& w = b.pre;
    if (!spec.service) fail("SERVICE_REQUIRED", "insourcing opens a service contract");
    if (spec.counterparties.size() != 1) {
        fail("MULTIVENDOR_INSOURCE", "insourcing admits exactly one counterparty");
    }
    const UnitId& giver = spec.counterparties.front();
    if (spec.subject.sources.empty()) fail("SUBJECT_REQUIRED", "insource needs sources");
    for (const auto& s : spec.subject.sources) {
        if (!(w.owner_of(s) == giver)) {
            fail("COUNTERPARTY_NOT_OWNER",
                 "counterparty does not own source '" + s.str() + "'");
        }
        if (!uses(w, giver, s)) {
            fail("COUNTERPARTY_NOT_USER",
                 "counterparty does not use source '" + s.str() + "'");
        }
    }
    check_commitment_scope(spec, spec.subject.sources);
    std::map<SourceId, UnitId> targets;
    for (const auto& s : spec.subject.sources) targets.emplace(s, spec.actor);
    b.transfer(targets);
    b.create_contract(*spec.service, spec.actor, giver);
    b.create_commitments(giver, spec.commitments_to_create, "contract:" + spec.service->id.str());
}

void apply_externalization(Builder& b, const TransformationSpec& spec) {
    const auto& w = b.pre;
    if (spec.service) fail("SERVICE_FORBIDDEN", "externalization carries no service");
    if (!spec.commitments_to_create.empty()) {
        fail("COMMITMENTS_FORBIDDEN", "externalization creates no commitments");
    }
    if (spec.counterparties.size() != 1) {
        fail("COUNTERPARTY_REQUIRED", "externalization names exactly one receiver");
    }
    if (spec.subject.sources.empty()) fail("SUBJECT_REQUIRED", "externalization needs sources");
    for (const auto& s : spec.subject.sources) {
        if (!(w.owner_of(s) == spec.actor)) {
            fail("ACTOR_NOT_OWNER", "actor does not own source '" + s.str() + "'");
        }
    }
    std::map<SourceId, UnitId> targets;
    for (const auto& s : spec.subject.sources) targets.emplace(s, spec.counterparties.front());
    b.transfer(targets);
    // no service follows, so the actor's use of the sources ends here
    b.remove_uses_of(spec.actor, {spec.subject.sources.begin(), spec.subject.sources.end()});
}

void apply_internalization(Builder& b, const TransformationSpec& spec) {
    const auto& w = b.pre;
    if (spec.service) fail("SERVICE_FORBIDDEN", "internalization carries no service");
    if (!spec.commitments_to_create.empty()) {
        fail("COMMITMENTS_FORBIDDEN", "internalization creates no commitments");
    }
    if (spec.counterparties.size() != 1) {
        fail("COUNTERPARTY_REQUIRED", "internalization names exactly one giver");
    }
    const UnitId& giver = spec.counterparties.front();
    if (spec.subject.sources.empty()) fail("SUBJECT_REQUIRED", "internalization needs sources");
    for (const auto& s : spec.subject.sources) {
        if (!(w.owner_of(s) == giver)) {
            fail("COUNTERPARTY_NOT_OWNER",
                 "counterparty does not own source '" + s.str() + "'");
        }
    }
    std::map<SourceId, UnitId> targets;
    for (const auto& s : spec.subject.sources) targets.emplace(s, spec.actor);
    b.transfer(targets);
    b.remove_uses_of(giver, {spec.subject.sources.begin(), spec.subject.sources.end()});
}

void apply_backsource(Builder& b, const TransformationSpec& spec, const HistoryLog& log) {
    const auto& w = b.pre;
    if (spec.subject.sources.empty()) fail("SUBJECT_REQUIRED", "backsource needs sources");
    std::set<ContractId> close_candidates;
    std::map<ContractId, std::set<SourceId>> contract_scope;
    for (const auto& s : spec.subject.sources) {
        (void)w.source(s);
        const HistoryEvent* e = latest_event_involving(log, s);
        if (!e || !(e->actor == spec.actor)) {
            fail("NOT_OUTSOURCED",
                 "source '" + s.str() + "' was not outsourced by the actor");
        }
        if (e->kind == transform_kind_name(TransformKind::OutsourceOfType)) {
            throw Error(Errc::UndefinedOperation, "BACKSOURCE_AFTER_TYPE",
                        "backsourcing '" + s.str() +
                            "' is undefined after an outsourcing of type");
        }
        bool chain = e->kind == transform_kind_name(TransformKind::Outsource) ||
                     e->kind == transform_kind_name(TransformKind::FollowUpOutsource) ||
                     e->kind == transform_kind_name(TransformKind::ProgressiveOutsource);
        if (!chain) {
            fail("NOT_OUTSOURCED",
                 "source '" + s.str() + "' was not outsourced by the actor");
        }
        if (e->params.contract_created) {
            close_candidates.insert(*e->params.contract_created);
            for (const auto& m : e->params.moves) {
                contract_scope[*e->params.contract_created].insert(m.source);
            }
        }
    }
    std::set<SourceId> subject(spec.subject.sources.begin(), spec.subject.sources.end());
    b.discharge_commitments(spec.actor, subject);
    std::map<SourceId, UnitId> targets;
    for (const auto& s : subject) targets.emplace(s, spec.actor);
    b.transfer(targets);
    for (const auto& cid : close_candidates) {
        if (!w.has_contract(cid)) continue;
        bool whole = true;
        for (const auto& s : contract_scope[cid]) whole &= subject.count(s) != 0;
        if (whole) b.terminate_contract(cid);
    }
}

void apply_follow_up(Builder& b, const TransformationSpec& spec) {
    const auto& w = b.pre;
    if (!spec.service) fail("SERVICE_REQUIRED", "follow-up opens the successor contract");
    const ServiceContract prior = resolve_prior_contract(w, spec);
    const UnitId prev = prior.provider;
    const UnitId next = spec.counterparties.front();
    if (next == prev) fail("SAME_PROVIDER", "follow-up must change the provider");
    if (!(spec.service->theme == prior.theme)) {
        fail("THEME_CHANGED", "the successor contract must keep the consumer's theme");
    }
    auto uc = w.unit_commitments.find(spec.actor);
    if (uc != w.unit_commitments.end() && !(uc->second == next)) {
        fail("UNIT_COMMITMENT", "actor is committed to provider '" + uc->second.str() + "'");
    }
    // sources the consumer is committed to travel from the old provider to
    // the new one
    std::vector<SourceId> moved;
    for (const auto& [cid, cm] : w.commitments) {
        if (cm.committed_unit == spec.actor && w.has_source(cm.source) &&
            w.owner_of(cm.source) == prev) {
            moved.push_back(cm.source);
        }
    }
    std::map<SourceId, UnitId> targets;
    for (const auto& s : moved) targets.emplace(s, next);
    b.terminate_contract(prior.id);
    b.transfer(targets);
    b.create_contract(*spec.service, next, spec.actor);
    for (auto& [cid, cm] : b.post.commitments) {
        if (cm.committed_unit == spec.actor &&
            std::find(moved.begin(), moved.end(), cm.source) != moved.end()) {
            cm.origin = "contract:" + spec.service->id.str();
        }
    }
    b.params.prev_provider = prev;
    b.params.new_provider = next;
}

void apply_progressive(Builder& b, const TransformationSpec& spec) {
    const auto& w = b.pre;
    if (!spec.service) fail("SERVICE_REQUIRED", "progressive outsourcing opens a contract");
    if (!spec.mission_tie || !*spec.mission_tie) {
        fail("MISSION_TIE_REQUIRED",
             "the mission-tie condition must be attested by the scenario");
    }
    const ServiceContract prior = resolve_prior_contract(w, spec);
    const UnitId prev = prior.provider;
    const UnitId next = spec.counterparties.front();
    if (next == prev) fail("SAME_PROVIDER", "progressive outsourcing must change the provider");
    if (!(spec.service->theme == prior.theme)) {
        fail("THEME_CHANGED", "the successor contract must keep the consumer's theme");
    }
    const std::string theme_name = w.theme(prior.theme).name;
    if (distinct_clients(w, prev, theme_name, &prior.id) > 0) {
        fail("PROVIDER_STILL_OFFERING",
             "previous provider still serves this theme elsewhere and cannot wind it down");
    }
    int prev_clients = distinct_clients(w, prev, theme_name, &prior.id);
    int next_clients = distinct_clients(w, next, theme_name, nullptr);
    if (!(next_clients > prev_clients)) {
        fail("CLIENT_COUNT", "the receiving unit must already serve more clients for '" +
                                 theme_name + "'");
    }
    // the old provider hands over everything it deploys for this service
    std::vector<SourceId> moved;
    for (const auto& ur : w.use_relations) {
        if (ur.user == spec.actor && ur.theme == prior.theme && w.has_source(ur.source) &&
            w.owner_of(ur.source) == prev) {
            moved.push_back(ur.source);
        }
    }
    std::map<SourceId, UnitId> targets;
    for (const auto& s : moved) targets.emplace(s, next);
    b.terminate_contract(prior.id);
    b.transfer(targets);
    b.create_contract(*spec.service, next, spec.actor);
    for (auto& [cid, cm] : b.post.commitments) {
        if (cm.committed_unit == spec.actor &&
            std::find(moved.begin(), moved.end(), cm.source) != moved.end()) {
            cm.origin = "contract:" + spec.service->id.str();
        }
    }
    b.params.prev_provider = prev;
    b.params.new_provider = next;
    b.params.mission_tie = spec.mission_tie;
}

void apply_decompose(Builder& b, const TransformationSpec& spec) {
    if (spec.service) fail("SERVICE_FORBIDDEN", "decomposition carries no service");
    if (!spec.subject.sourcement) {
        fail("SUBJECT_REQUIRED", "decompose needs a sourcement subject");
    }
    auto it = b.post.sourcements.find(*spec.subject.sourcement);
    if (it == b.post.sourcements.end()) {
        throw_unknown("sourcement", *spec.subject.sourcement);
    }
    Sourcement& sm = it->second;
    if (!(sm.principal == spec.actor)) {
        fail("ACTOR_NOT_PRINCIPAL", "only the principal refines its sourcement");
    }
    if (spec.partition.size() < 2) {
        fail("TRIVIAL_PARTITION", "decomposition must yield at least two groups");
    }
    std::set<SourceId> wanted;
    for (const auto& part : spec.partition) {
        if (part.empty()) fail("PARTITION_MISMATCH", "empty group in the partition");
        for (const auto& s : part) {
            if (!wanted.insert(s).second) {
                fail("PARTITION_MISMATCH", "source '" + s.str() + "' listed twice");
            }
        }
    }
    auto target = sm.basics.end();
    for (auto bit = sm.basics.begin(); bit != sm.basics.end(); ++bit) {
        std::set<SourceId> members(bit->sources.begin(), bit->sources.end());
        if (members == wanted) {
            target = bit;
            break;
        }
    }
    if (target == sm.basics.end()) {
        fail("PARTITION_MISMATCH", "the partition does not cover exactly one basic group");
    }
    UnitId owner = target->owner;
    sm.basics.erase(target);
    for (const auto& part : spec.partition) {
        BasicSourcement nb;
        nb.owner = owner;
        nb.sources = part;
        std::sort(nb.sources.begin(), nb.sources.end());
        sm.basics.push_back(std::move(nb));
    }
    b.params.subject_sourcement = sm.id;
}

void apply_develop(Builder& b, const TransformationSpec& spec) {
    const auto& w = b.pre;
    if (!spec.source_payload) fail("PAYLOAD_REQUIRED", "develop needs a source payload");
    const SourcePayload& p = *spec.source_payload;
    if (w.has_source(p.id)) {
        fail("DUPLICATE_ID", "source id '" + p.id.str() + "' already declared");
    }
    (void)w.source_type(p.type);
    for (const auto& d : p.depends_on) (void)w.source(d);
    if (w.source_type(p.type).singleton) {
        for (const auto& [sid, s] : w.sources) {
            if (s.type == p.type && s.owner == spec.actor) {
                fail("SINGLETON_VIOLATION",
                     "actor already owns a source of singleton type '" + p.type.str() + "'");
            }
        }
    }
    Source s;
    s.id = p.id;
    s.type = p.type;
    s.owner = spec.actor;
    s.descriptor = p.descriptor;
    s.depends_on = p.depends_on;
    s.management_function = p.management_function;
    b.post.sources.emplace(s.id, s);
    b.params.created_sources.push_back(p.id);
    if (p.use_for) {
        if (!w.has_theme(*p.use_for) || !(w.theme(*p.use_for).maintainer == spec.actor)) {
            fail("USE_THEME_NOT_MAINTAINED",
                 "develop can only bind the source to a theme the actor maintains");
        }
        b.post.add_use(UseRelation{spec.actor, p.id, *p.use_for});
    }
}

void apply_drop(Builder& b, const TransformationSpec& spec) {
    const auto& w = b.pre;
    if (spec.subject.sources.empty()) fail("SUBJECT_REQUIRED", "drop needs sources");
    std::set<SourceId> gone(spec.subject.sources.begin(), spec.subject.sources.end());
    for (const auto& s : gone) {
        if (!(w.owner_of(s) == spec.actor)) {
            fail("ACTOR_NOT_OWNER", "actor does not own source '" + s.str() + "'");
        }
        for (const auto& [cid, cm] : w.commitments) {
            if (cm.source == s) {
                fail("COMMITMENT_EXISTS", "source '" + s.str() +
                                              "' cannot be dropped while '" +
                                              cm.committed_unit.str() + "' is committed to it");
            }
        }
    }
    for (const auto& s : gone) {
        b.post.sources.erase(s);
        b.params.removed_sources.push_back(s);
    }
    auto& urs = b.post.use_relations;
    urs.erase(std::remove_if(urs.begin(), urs.end(),
                             [&](const UseRelation& ur) { return gone.count(ur.source) != 0; }),
              urs.end());
    for (auto& [sid, src] : b.post.sources) {
        auto& dep = src.depends_on;
        dep.erase(std::remove_if(dep.begin(), dep.end(),
                                 [&](const SourceId& d) { return gone.count(d) != 0; }),
                  dep.end());
    }
    for (auto& [smid, sm] : b.post.sourcements) {
        for (auto& basic : sm.basics) {
            auto& ms = basic.sources;
            ms.erase(std::remove_if(ms.begin(), ms.end(),
                                    [&](const SourceId& m) { return gone.count(m) != 0; }),
                     ms.end());
        }
        sm.basics.erase(std::remove_if(sm.basics.begin(), sm.basics.end(),
                                       [](const BasicSourcement& basic) {
                                           return basic.sources.empty();
                                       }),
                        sm.basics.end());
        for (auto* list : sm.attributes.ref_lists()) {
            list->erase(std::remove_if(list->begin(), list->end(),
                                       [&](const SourceId& r) { return gone.count(r) != 0; }),
                        list->end());
        }
    }
}

}  // namespace

Applied apply(const WorldState& state, const TransformationSpec& spec, const HistoryLog& log,
              std::optional<Timestamp> now) {
    std::string pre_digest = state_digest(state);
    require_actor(state, spec);
    for (const auto& s : spec.subject.sources) (void)state.source(s);
    if (spec.subject.type) (void)state.source_type(*spec.subject.type);
    if (spec.subject.theme) (void)state.theme(*spec.subject.theme);

    Builder b(state);
    if (now) b.post.timestamp = *now;
    switch (spec.kind) {
        case TransformKind::Outsource: apply_outsource(b, spec); break;
        case TransformKind::OutsourceOfType: apply_outsource_of_type(b, spec); break;
        case TransformKind::Insource: apply_insource(b, spec); break;
        case TransformKind::Backsource: apply_backsource(b, spec, log); break;
        case TransformKind::FollowUpOutsource: apply_follow_up(b, spec); break;
        case TransformKind::SourceExternalization: apply_externalization(b, spec); break;
        case TransformKind::SourceInternalization: apply_internalization(b, spec); break;
        case TransformKind::ProgressiveOutsource: apply_progressive(b, spec); break;
        case TransformKind::DecomposeSourcement: apply_decompose(b, spec); break;
        case TransformKind::DropSource: apply_drop(b, spec); break;
        case TransformKind::DevelopSource: apply_develop(b, spec); break;
    }

    HistoryEvent e;
    e.seq = log.empty() ? 1 : log.back().seq + 1;
    e.time = b.post.timestamp;
    e.kind = transform_kind_name(spec.kind);
    e.actor = spec.actor;
    e.params = b.params;
    e.params.counterparties = spec.counterparties;
    e.params.compensation = spec.compensation;
    e.pre_digest = pre_digest;

    std::set<SourceId> touched;
    for (const auto& m : e.params.moves) touched.insert(m.source);
    for (const auto& c : e.params.created_sources) touched.insert(c);
    for (const auto& r : e.params.removed_sources) touched.insert(r);
    b.touch_sourcements(touched, e.seq);
    if (e.params.subject_sourcement) {
        b.post.sourcements.at(*e.params.subject_sourcement).history.push_back(e.seq);
    }

    Diagnostics ds = validate_state(b.post);
    if (has_errors(ds)) {
        std::string code;
        for (const auto& d : ds) {
            if (d.severity == Severity::Error) {
                code = d.code;
                break;
            }
        }
        fail(code, "transformation would leave the state invalid: " + code);
    }
    e.post_digest = state_digest(b.post);

    Applied out{std::move(b.post), log};
    out.log.push_back(std::move(e));
    return out;
}

}  // namespace stratos
