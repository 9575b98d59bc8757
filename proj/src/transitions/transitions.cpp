#include "transitions/transitions.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "core/digest.hpp"
#include "core/error.hpp"
#include "core/validate.hpp"
#include "relations/relations.hpp"

namespace stratos {

namespace {

struct StepKindName {
    StepKind kind;
    const char* name;
};

constexpr StepKindName kStepNames[] = {
    {StepKind::TransferOwnership, "transfer_ownership"},
    {StepKind::CreateContract, "create_contract"},
    {StepKind::TerminateContract, "terminate_contract"},
    {StepKind::CreateCommitment, "create_commitment"},
    {StepKind::DischargeCommitment, "discharge_commitment"},
    {StepKind::CreateSource, "create_source"},
    {StepKind::RemoveSource, "remove_source"},
    {StepKind::AddUseRelation, "add_use_relation"},
    {StepKind::RemoveUseRelation, "remove_use_relation"},
    {StepKind::TransferTheme, "transfer_theme"},
    {StepKind::SplitBasic, "split_basic"},
};

[[noreturn]] void fail(const std::string& detail, const std::string& message) {
    throw Error(Errc::PreconditionFailed, detail, message);
}

void step_transfer(WorldState& w, const PrimitiveStep& st) {
    const Source& s = w.source(st.source);
    if (!(s.owner == st.from)) {
        fail("FROM_MISMATCH", "source '" + st.source.str() + "' is owned by '" + s.owner.str() +
                                  "', not '" + st.from.str() + "'");
    }
    (void)w.unit(st.to);
    w.sources.at(st.source).owner = st.to;
    // a basic group follows once all of its members have arrived
    for (auto& [smid, sm] : w.sourcements) {
        for (auto& b : sm.basics) {
            bool involved = std::find(b.sources.begin(), b.sources.end(), st.source) !=
                            b.sources.end();
            if (!involved) continue;
            bool all_there = true;
            for (const auto& m : b.sources) {
                all_there &= w.has_source(m) && w.owner_of(m) == st.to;
            }
            if (all_there) b.owner = st.to;
        }
    }
}

void step_create_contract(WorldState& w, const PrimitiveStep& st) {
    if (!st.contract) fail("PAYLOAD_REQUIRED", "create_contract step without a payload");
    const ServicePayload& p = *st.contract;
    if (w.has_contract(p.id)) {
        fail("DUPLICATE_ID", "contract id '" + p.id.str() + "' already declared");
    }
    if (!w.has_theme(p.theme)) {
        fail("UNKNOWN_THEME", "service theme '" + p.theme.str() + "' does not resolve");
    }
    ServiceContract c;
    c.id = p.id;
    c.provider = st.from;
    c.consumer = st.to;
    c.theme = p.theme;
    c.period_start = p.period_start;
    c.period_end = p.period_end;
    c.termination_protocol = p.termination_protocol;
    c.notice_interval = p.notice_interval;
    c.compensation = p.compensation;
    c.intentional_commitment_terms = p.intentional_commitment_terms;
    w.contracts.emplace(c.id, c);
}

void step_create_commitment(WorldState& w, const PrimitiveStep& st) {
    (void)w.unit(st.unit);
    (void)w.source(st.source);
    if (w.find_commitment(st.unit, st.source)) {
        fail("DUPLICATE_COMMITMENT", "unit '" + st.unit.str() +
                                         "' is already committed to source '" + st.source.str() +
                                         "'");
    }
    SourceCommitment cm;
    cm.id = derived_commitment_id(st.unit, st.source);
    cm.committed_unit = st.unit;
    cm.source = st.source;
    cm.origin = st.origin;
    w.commitments.emplace(cm.id, cm);
}

void step_create_source(WorldState& w, const PrimitiveStep& st) {
    if (!st.source_payload) fail("PAYLOAD_REQUIRED", "create_source step without a payload");
    const SourcePayload& p = *st.source_payload;
    if (w.has_source(p.id)) {
        fail("DUPLICATE_ID", "source id '" + p.id.str() + "' already declared");
    }
    (void)w.source_type(p.type);
    (void)w.unit(st.owner);
    for (const auto& d : p.depends_on) (void)w.source(d);
    Source s;
    s.id = p.id;
    s.type = p.type;
    s.owner = st.owner;
    s.descriptor = p.descriptor;
    s.depends_on = p.depends_on;
    s.management_function = p.management_function;
    w.sources.emplace(s.id, s);
}

void step_remove_source(WorldState& w, const PrimitiveStep& st) {
    (void)w.source(st.source);
    for (const auto& [cid, cm] : w.commitments) {
        if (cm.source == st.source) {
            fail("COMMITMENT_EXISTS", "source '" + st.source.str() +
                                          "' cannot be removed while '" +
                                          cm.committed_unit.str() + "' is committed to it");
        }
    }
    w.sources.erase(st.source);
    auto& urs = w.use_relations;
    urs.erase(std::remove_if(urs.begin(), urs.end(),
                             [&](const UseRelation& ur) { return ur.source == st.source; }),
              urs.end());
    for (auto& [sid, src] : w.sources) {
        auto& dep = src.depends_on;
        dep.erase(std::remove(dep.begin(), dep.end(), st.source), dep.end());
    }
    for (auto& [smid, sm] : w.sourcements) {
        for (auto& basic : sm.basics) {
            auto& ms = basic.sources;
            ms.erase(std::remove(ms.begin(), ms.end(), st.source), ms.end());
        }
        sm.basics.erase(
            std::remove_if(sm.basics.begin(), sm.basics.end(),
                           [](const BasicSourcement& basic) { return basic.sources.empty(); }),
            sm.basics.end());
        for (auto* list : sm.attributes.ref_lists()) {
            list->erase(std::remove(list->begin(), list->end(), st.source), list->end());
        }
    }
}

void step_add_use(WorldState& w, const PrimitiveStep& st) {
    (void)w.unit(st.unit);
    (void)w.source(st.source);
    (void)w.theme(st.theme);
    UseRelation ur{st.unit, st.source, st.theme};
    if (w.has_use(ur)) fail("DUPLICATE_USE", "the use relation is already present");
    w.add_use(ur);
}

void step_remove_use(WorldState& w, const PrimitiveStep& st) {
    UseRelation ur{st.unit, st.source, st.theme};
    if (!w.has_use(ur)) fail("UNKNOWN_USE", "the use relation is not present");
    w.remove_use(ur);
}

void step_transfer_theme(WorldState& w, const PrimitiveStep& st) {
    (void)w.theme(st.theme);
    Theme& t = w.themes.at(st.theme);
    if (!(t.maintainer == st.from)) {
        fail("FROM_MISMATCH", "theme '" + st.theme.str() + "' is maintained by '" +
                                  t.maintainer.str() + "', not '" + st.from.str() + "'");
    }
    (void)w.unit(st.to);
    t.maintainer = st.to;
}

void step_split_basic(WorldState& w, const PrimitiveStep& st) {
    auto it = w.sourcements.find(st.sourcement);
    if (it == w.sourcements.end()) throw_unknown("sourcement", st.sourcement);
    Sourcement& sm = it->second;
    if (st.partition.size() < 2) {
        fail("TRIVIAL_PARTITION", "a split must yield at least two groups");
    }
    std::set<SourceId> wanted;
    for (const auto& part : st.partition) {
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
    for (const auto& part : st.partition) {
        BasicSourcement nb;
        nb.owner = owner;
        nb.sources = part;
        std::sort(nb.sources.begin(), nb.sources.end());
        sm.basics.push_back(std::move(nb));
    }
}

void apply_step(WorldState& w, const PrimitiveStep& st) {
    switch (st.kind) {
        case StepKind::TransferOwnership: step_transfer(w, st); break;
        case StepKind::CreateContract: step_create_contract(w, st); break;
        case StepKind::TerminateContract:
            (void)w.contract(st.contract_id);
            w.contracts.erase(st.contract_id);
            break;
        case StepKind::CreateCommitment: step_create_commitment(w, st); break;
        case StepKind::DischargeCommitment:
            if (!w.commitments.count(st.commitment_id)) {
                throw_unknown("commitment", st.commitment_id.str());
            }
            w.commitments.erase(st.commitment_id);
            break;
        case StepKind::CreateSource: step_create_source(w, st); break;
        case StepKind::RemoveSource: step_remove_source(w, st); break;
        case StepKind::AddUseRelation: step_add_use(w, st); break;
        case StepKind::RemoveUseRelation: step_remove_use(w, st); break;
        case StepKind::TransferTheme: step_transfer_theme(w, st); break;
        case StepKind::SplitBasic: step_split_basic(w, st); break;
    }
}

// the source a step is about, for lane assignment; empty means lane 0
SourceId step_source(const PrimitiveStep& st) {
    switch (st.kind) {
        case StepKind::TransferOwnership:
        case StepKind::CreateCommitment:
        case StepKind::RemoveSource:
        case StepKind::AddUseRelation:
        case StepKind::RemoveUseRelation: return st.source;
        case StepKind::CreateSource:
            return st.source_payload ? st.source_payload->id : SourceId();
        default: return SourceId();
    }
}

struct LaneAssigner {
    std::map<SourceId, SourceId> parent;

    SourceId find(const SourceId& s) {
        auto it = parent.find(s);
        if (it == parent.end()) {
            parent.emplace(s, s);
            return s;
        }
        if (it->second == s) return s;
        SourceId root = find(it->second);
        parent[s] = root;
        return root;
    }

    void unite(const SourceId& a, const SourceId& b) { parent[find(a)] = find(b); }

    // mutually dependent sources share a lane, in either the old or the new
    // dependency picture
    void absorb(const WorldState& w, const std::set<SourceId>& involved) {
        for (const auto& s : involved) {
            if (!w.has_source(s)) continue;
            for (const auto& r : dependency_closure(w, s)) {
                if (involved.count(r)) unite(s, r);
            }
        }
    }
};

void assign_lanes(std::vector<PrimitiveStep>& steps, const WorldState& pre,
                  const WorldState& post) {
    std::set<SourceId> involved;
    for (const auto& st : steps) {
        SourceId s = step_source(st);
        if (!s.empty()) involved.insert(s);
    }
    LaneAssigner uf;
    for (const auto& s : involved) uf.find(s);
    uf.absorb(pre, involved);
    uf.absorb(post, involved);
    std::map<SourceId, int> lanes;
    int next = 1;
    for (auto& st : steps) {
        SourceId s = step_source(st);
        if (s.empty()) {
            st.lane = 0;
            continue;
        }
        SourceId root = uf.find(s);
        auto it = lanes.find(root);
        if (it == lanes.end()) it = lanes.emplace(root, next++).first;
        st.lane = it->second;
    }
}

ServicePayload payload_of(const ServiceContract& c) {
    ServicePayload p;
    p.id = c.id;
    p.theme = c.theme;
    p.period_start = c.period_start;
    p.period_end = c.period_end;
    p.termination_protocol = c.termination_protocol;
    p.notice_interval = c.notice_interval;
    p.compensation = c.compensation;
    p.intentional_commitment_terms = c.intentional_commitment_terms;
    return p;
}

}  // namespace

const char* step_kind_name(StepKind k) {
    for (const auto& e : kStepNames) {
        if (e.kind == k) return e.name;
    }
    return "transfer_ownership";
}

std::optional<StepKind> step_kind_from_name(const std::string& s) {
    for (const auto& e : kStepNames) {
        if (s == e.name) return e.kind;
    }
    return std::nullopt;
}

TransitionPlan plan(const WorldState& state, const TransformationSpec& spec,
                    const HistoryLog& log) {
    Applied target = apply(state, spec, log);
    const WorldState& post = target.state;
    const EventParams& params = target.event().params;

    std::vector<PrimitiveStep> steps;
    auto push = [&](PrimitiveStep st) { steps.push_back(std::move(st)); };

    // commitments are matched by identifier; a changed origin re-issues the
    // commitment under the successor contract
    auto cm_key = [](const SourceCommitment& cm) {
        return std::tuple<std::string, std::string, std::string>(cm.committed_unit.str(),
                                                                 cm.source.str(), cm.origin);
    };
    for (const auto& [cid, cm] : state.commitments) {
        auto it = post.commitments.find(cid);
        if (it != post.commitments.end() && cm_key(it->second) == cm_key(cm)) continue;
        PrimitiveStep st;
        st.kind = StepKind::DischargeCommitment;
        st.commitment_id = cid;
        st.source = cm.source;
        push(st);
    }
    for (const auto& [cid, c] : state.contracts) {
        if (post.contracts.count(cid)) continue;
        PrimitiveStep st;
        st.kind = StepKind::TerminateContract;
        st.contract_id = cid;
        push(st);
    }
    for (const auto& ur : state.use_relations) {
        if (post.has_use(ur)) continue;
        PrimitiveStep st;
        st.kind = StepKind::RemoveUseRelation;
        st.unit = ur.user;
        st.source = ur.source;
        st.theme = ur.theme;
        push(st);
    }
    for (const auto& m : params.moves) {
        PrimitiveStep st;
        st.kind = StepKind::TransferOwnership;
        st.source = m.source;
        st.from = m.from;
        st.to = m.to;
        push(st);
    }
    if (spec.kind == TransformKind::DecomposeSourcement && spec.subject.sourcement) {
        PrimitiveStep st;
        st.kind = StepKind::SplitBasic;
        st.sourcement = *spec.subject.sourcement;
        st.partition = spec.partition;
        push(st);
    }
    for (const auto& [sid, s] : post.sources) {
        if (state.sources.count(sid)) continue;
        PrimitiveStep st;
        st.kind = StepKind::CreateSource;
        SourcePayload p;
        p.id = s.id;
        p.type = s.type;
        p.descriptor = s.descriptor;
        p.depends_on = s.depends_on;
        p.management_function = s.management_function;
        st.source_payload = p;
        st.owner = s.owner;
        push(st);
    }
    for (const auto& [sid, s] : state.sources) {
        if (post.sources.count(sid)) continue;
        PrimitiveStep st;
        st.kind = StepKind::RemoveSource;
        st.source = sid;
        push(st);
    }
    for (const auto& [cid, c] : post.contracts) {
        if (state.contracts.count(cid)) continue;
        PrimitiveStep st;
        st.kind = StepKind::CreateContract;
        st.contract = payload_of(c);
        st.from = c.provider;
        st.to = c.consumer;
        push(st);
    }
    if (params.theme_moved && params.theme_from && params.theme_to) {
        PrimitiveStep st;
        st.kind = StepKind::TransferTheme;
        st.theme = *params.theme_moved;
        st.from = *params.theme_from;
        st.to = *params.theme_to;
        push(st);
    }
    for (const auto& ur : post.use_relations) {
        if (state.has_use(ur)) continue;
        PrimitiveStep st;
        st.kind = StepKind::AddUseRelation;
        st.unit = ur.user;
        st.source = ur.source;
        st.theme = ur.theme;
        push(st);
    }
    for (const auto& [cid, cm] : post.commitments) {
        auto it = state.commitments.find(cid);
        if (it != state.commitments.end() && cm_key(it->second) == cm_key(cm)) continue;
        PrimitiveStep st;
        st.kind = StepKind::CreateCommitment;
        st.unit = cm.committed_unit;
        st.source = cm.source;
        st.origin = cm.origin;
        push(st);
    }

    assign_lanes(steps, state, post);

    TransitionPlan p;
    p.steps = std::move(steps);
    p.declared_pre = target.event().pre_digest;
    p.declared_post = target.event().post_digest;
    p.annotations.push_back(std::string("implements ") + transform_kind_name(spec.kind));
    return p;
}

std::vector<WorldState> apply_plan(const WorldState& state, const TransitionPlan& plan) {
    if (!plan.declared_pre.empty() && plan.declared_pre != state_digest(state)) {
        throw Error(Errc::PreMismatch, "DECLARED_PRE",
                    "the plan was made for a state with fingerprint " + plan.declared_pre);
    }
    std::vector<WorldState> states;
    states.reserve(plan.steps.size() + 1);
    states.push_back(state);
    for (std::size_t i = 0; i < plan.steps.size(); ++i) {
        WorldState next = states.back();
        try {
            apply_step(next, plan.steps[i]);
        } catch (const Error& e) {
            throw Error(Errc::StepFailed, std::to_string(i),
                        "step " + std::to_string(i) + " (" +
                            step_kind_name(plan.steps[i].kind) + "): " + e.what());
        }
        Diagnostics ds = validate_state(next);
        if (has_errors(ds)) {
            std::ostringstream oss;
            oss << "step " << i << " (" << step_kind_name(plan.steps[i].kind)
                << ") leaves the state invalid:";
            for (const auto& d : ds) {
                if (d.severity == Severity::Error) oss << " " << d.code;
            }
            throw Error(Errc::StepFailed, std::to_string(i), oss.str());
        }
        states.push_back(std::move(next));
    }
    if (!plan.declared_post.empty() && plan.declared_post != state_digest(states.back())) {
        throw Error(Errc::PreMismatch, "DECLARED_POST",
                    "the executed plan does not land on fingerprint " + plan.declared_post);
    }
    return states;
}

bool verify_plan(const WorldState& state, const TransitionPlan& plan,
                 const TransformationSpec& spec, const HistoryLog& log,
                 Diagnostics* diagnostics) {
    auto report = [&](const std::string& code, const std::string& message) {
        if (diagnostics) diagnostics->push_back(error_diag(code, {}, message));
        return false;
    };
    try {
        Applied target = apply(state, spec, log);
        std::vector<WorldState> run = apply_plan(state, plan);
        std::string got = state_digest(run.back());
        if (got != target.event().post_digest) {
            return report("PLAN_DIVERGES", "the plan lands on " + got +
                                               " but the transformation produces " +
                                               target.event().post_digest);
        }
        return true;
    } catch (const Error& e) {
        return report(errc_name(e.code()), e.what());
    } catch (const std::exception& e) {
        return report("IO", e.what());
    }
}

Json step_to_json(const PrimitiveStep& st) {
    Json j;
    j["kind"] = step_kind_name(st.kind);
    j["lane"] = st.lane;
    if (!st.source.empty()) j["source"] = st.source.str();
    if (!st.from.empty()) j["from"] = st.from.str();
    if (!st.to.empty()) j["to"] = st.to.str();
    if (!st.unit.empty()) j["unit"] = st.unit.str();
    if (st.contract) {
        const ServicePayload& p = *st.contract;
        Json c;
        c["id"] = p.id.str();
        c["theme"] = p.theme.str();
        c["period_start"] = p.period_start;
        c["period_end"] = p.period_end;
        c["termination_protocol"] = p.termination_protocol;
        c["notice_interval"] = p.notice_interval;
        c["compensation"] = compensation_name(p.compensation);
        c["intentional_commitment_terms"] =
            commitment_terms_name(p.intentional_commitment_terms);
        j["contract"] = c;
    }
    if (!st.contract_id.empty()) j["contract_id"] = st.contract_id.str();
    if (!st.commitment_id.empty()) j["commitment_id"] = st.commitment_id.str();
    if (!st.origin.empty()) j["origin"] = st.origin;
    if (st.source_payload) {
        const SourcePayload& p = *st.source_payload;
        Json s;
        s["id"] = p.id.str();
        s["type"] = p.type.str();
        if (!p.descriptor.empty()) s["descriptor"] = p.descriptor;
        if (!p.depends_on.empty()) {
            Json deps = Json::array();
            for (const auto& d : p.depends_on) deps.push_back(d.str());
            s["depends_on"] = deps;
        }
        if (p.management_function) s["management_function"] = true;
        j["source_payload"] = s;
    }
    if (!st.owner.empty()) j["owner"] = st.owner.str();
    if (!st.theme.empty()) j["theme"] = st.theme.str();
    if (!st.sourcement.empty()) j["sourcement"] = st.sourcement;
    if (!st.partition.empty()) {
        Json parts = Json::array();
        for (const auto& part : st.partition) {
            Json group = Json::array();
            for (const auto& s : part) group.push_back(s.str());
            parts.push_back(group);
        }
        j["partition"] = parts;
    }
    if (!st.note.empty()) j["note"] = st.note;
    return j;
}

PrimitiveStep step_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) {
        throw Error(Errc::InvalidInput, "BAD_SHAPE", "a step needs a string 'kind'");
    }
    auto kind = step_kind_from_name(j.at("kind").get<std::string>());
    if (!kind) {
        throw Error(Errc::InvalidInput, "BAD_SHAPE",
                    "unknown step kind '" + j.at("kind").get<std::string>() + "'");
    }
    PrimitiveStep st;
    st.kind = *kind;
    auto str = [&](const char* key) {
        return j.contains(key) ? j.at(key).get<std::string>() : std::string();
    };
    st.lane = j.contains("lane") ? j.at("lane").get<int>() : 0;
    st.source = SourceId(str("source"));
    st.from = UnitId(str("from"));
    st.to = UnitId(str("to"));
    st.unit = UnitId(str("unit"));
    if (j.contains("contract")) {
        const Json& c = j.at("contract");
        ServicePayload p;
        p.id = ContractId(c.at("id").get<std::string>());
        p.theme = ThemeId(c.at("theme").get<std::string>());
        p.period_start = c.at("period_start").get<Timestamp>();
        p.period_end = c.at("period_end").get<Timestamp>();
        if (c.contains("termination_protocol")) {
            p.termination_protocol = c.at("termination_protocol").get<std::string>();
        }
        if (c.contains("notice_interval")) {
            p.notice_interval = c.at("notice_interval").get<Timestamp>();
        }
        if (c.contains("compensation")) {
            auto comp = compensation_from_name(c.at("compensation").get<std::string>());
            if (!comp) {
                throw Error(Errc::InvalidInput, "BAD_SHAPE", "unknown compensation form");
            }
            p.compensation = *comp;
        }
        if (c.contains("intentional_commitment_terms")) {
            auto terms = commitment_terms_from_name(
                c.at("intentional_commitment_terms").get<std::string>());
            if (!terms) {
                throw Error(Errc::InvalidInput, "BAD_SHAPE", "unknown commitment terms");
            }
            p.intentional_commitment_terms = *terms;
        }
        st.contract = p;
    }
    st.contract_id = ContractId(str("contract_id"));
    st.commitment_id = CommitmentId(str("commitment_id"));
    st.origin = str("origin");
    if (j.contains("source_payload")) {
        const Json& s = j.at("source_payload");
        SourcePayload p;
        p.id = SourceId(s.at("id").get<std::string>());
        p.type = SourceTypeId(s.at("type").get<std::string>());
        if (s.contains("descriptor")) p.descriptor = s.at("descriptor").get<std::string>();
        if (s.contains("depends_on")) {
            for (const auto& d : s.at("depends_on")) {
                p.depends_on.push_back(SourceId(d.get<std::string>()));
            }
        }
        if (s.contains("management_function")) {
            p.management_function = s.at("management_function").get<bool>();
        }
        st.source_payload = p;
    }
    st.owner = UnitId(str("owner"));
    st.theme = ThemeId(str("theme"));
    st.sourcement = str("sourcement");
    if (j.contains("partition")) {
        for (const auto& part : j.at("partition")) {
            std::vector<SourceId> group;
            for (const auto& s : part) group.push_back(SourceId(s.get<std::string>()));
            st.partition.push_back(std::move(group));
        }
    }
    st.note = str("note");
    return st;
}

Json plan_to_json(const TransitionPlan& p) {
    Json j;
    Json steps = Json::array();
    for (const auto& st : p.steps) steps.push_back(step_to_json(st));
    j["steps"] = steps;
    j["declared_pre"] = p.declared_pre;
    j["declared_post"] = p.declared_post;
    if (!p.annotations.empty()) {
        Json notes = Json::array();
        for (const auto& a : p.annotations) notes.push_back(a);
        j["annotations"] = notes;
    }
    return j;
}

TransitionPlan plan_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("steps") || !j.at("steps").is_array()) {
        throw Error(Errc::InvalidInput, "BAD_SHAPE", "a plan needs a 'steps' array");
    }
    TransitionPlan p;
    for (const auto& js : j.at("steps")) p.steps.push_back(step_from_json(js));
    if (j.contains("declared_pre")) p.declared_pre = j.at("declared_pre").get<std::string>();
    if (j.contains("declared_post")) p.declared_post = j.at("declared_post").get<std::string>();
    if (j.contains("annotations")) {
        for (const auto& a : j.at("annotations")) p.annotations.push_back(a.get<std::string>());
    }
    return p;
}

}  // namespace stratos
