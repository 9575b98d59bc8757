#include "core/json_io.hpp"

#include "core/error.hpp"

namespace stratos {

namespace {

template <class IdT>
Json ids_json(const std::vector<IdT>& ids) {
    Json a = Json::array();
    for (const auto& id : ids) a.push_back(id.str());
    return a;
}

Json strings_json(const std::vector<std::string>& xs) {
    Json a = Json::array();
    for (const auto& x : xs) a.push_back(x);
    return a;
}

template <class IdT>
std::vector<IdT> ids_from(const Json& a) {
    std::vector<IdT> out;
    for (const auto& v : a) out.push_back(IdT(v.template get<std::string>()));
    return out;
}

[[noreturn]] void bad_shape(const std::string& what) {
    throw Error(Errc::InvalidInput, "malformed state json: " + what);
}

const Json& need(const Json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) bad_shape(std::string("missing field '") + key + "'");
    return *it;
}

std::string need_str(const Json& j, const char* key) {
    const Json& v = need(j, key);
    if (!v.is_string()) bad_shape(std::string("field '") + key + "' must be a string");
    return v.get<std::string>();
}

Json attributes_to_json(const AttributeRecord& a) {
    Json j = Json::object();
    if (a.thematic_operations) j["thematic_operations"] = *a.thematic_operations;
    if (!a.location.empty()) j["location"] = ids_json(a.location);
    if (!a.facilities.empty()) j["facilities"] = ids_json(a.facilities);
    if (!a.operational_staff.empty()) j["operational_staff"] = ids_json(a.operational_staff);
    if (!a.managing_staff.empty()) j["managing_staff"] = ids_json(a.managing_staff);
    if (!a.contract_management_staff.empty())
        j["contract_management_staff"] = ids_json(a.contract_management_staff);
    if (!a.directing_staff.empty()) j["directing_staff"] = ids_json(a.directing_staff);
    if (a.intellectual_property) j["intellectual_property"] = *a.intellectual_property;
    if (a.data_knowledge_software) j["data_knowledge_software"] = *a.data_knowledge_software;
    return j;
}

AttributeRecord attributes_from_json(const Json& j) {
    AttributeRecord a;
    if (j.contains("thematic_operations"))
        a.thematic_operations = j["thematic_operations"].get<std::string>();
    if (j.contains("location")) a.location = ids_from<SourceId>(j["location"]);
    if (j.contains("facilities")) a.facilities = ids_from<SourceId>(j["facilities"]);
    if (j.contains("operational_staff"))
        a.operational_staff = ids_from<SourceId>(j["operational_staff"]);
    if (j.contains("managing_staff")) a.managing_staff = ids_from<SourceId>(j["managing_staff"]);
    if (j.contains("contract_management_staff"))
        a.contract_management_staff = ids_from<SourceId>(j["contract_management_staff"]);
    if (j.contains("directing_staff")) a.directing_staff = ids_from<SourceId>(j["directing_staff"]);
    if (j.contains("intellectual_property"))
        a.intellectual_property = j["intellectual_property"].get<std::string>();
    if (j.contains("data_knowledge_software"))
        a.data_knowledge_software = j["data_knowledge_software"].get<std::string>();
    return a;
}

}  // namespace

Json sourcement_to_json(const Sourcement& s) {
    Json j;
    j["id"] = s.id;
    j["principal"] = s.principal.str();
    j["themes"] = ids_json(s.themes);
    Json basics = Json::array();
    for (const auto& b : s.basics) {
        Json bj;
        bj["owner"] = b.owner.str();
        bj["sources"] = ids_json(b.sources);
        basics.push_back(bj);
    }
    j["basics"] = basics;
    Json providers = Json::array();
    for (const auto& p : s.providers()) providers.push_back(p.str());
    j["providers"] = providers;
    j["attributes"] = attributes_to_json(s.attributes);
    if (s.unstable_deadline) {
        j["stability"] = Json{{"unstable", true}, {"deadline", *s.unstable_deadline}};
    } else {
        j["stability"] = Json{{"unstable", false}};
    }
    Json hist = Json::array();
    for (auto seq : s.history) hist.push_back(seq);
    j["history"] = hist;
    return j;
}

Sourcement sourcement_from_json(const Json& j) {
    Sourcement s;
    s.id = need_str(j, "id");
    s.principal = UnitId(need_str(j, "principal"));
    s.themes = ids_from<ThemeId>(need(j, "themes"));
    for (const auto& bj : need(j, "basics")) {
        BasicSourcement b;
        b.owner = UnitId(need_str(bj, "owner"));
        b.sources = ids_from<SourceId>(need(bj, "sources"));
        s.basics.push_back(std::move(b));
    }
    if (j.contains("attributes")) s.attributes = attributes_from_json(j["attributes"]);
    if (j.contains("stability")) {
        const Json& st = j["stability"];
        if (st.value("unstable", false)) s.unstable_deadline = st.value("deadline", Timestamp{0});
    }
    if (j.contains("history"))
        for (const auto& v : j["history"]) s.history.push_back(v.get<std::int64_t>());
    return s;
}

Json state_to_json(const WorldState& state) {
    Json j;
    Json units = Json::array();
    for (const auto& [id, u] : state.units) {
        Json uj;
        uj["id"] = id.str();
        uj["name"] = u.name;
        if (u.parent) uj["parent"] = u.parent->str();
        if (u.mission) uj["mission"] = *u.mission;
        units.push_back(uj);
    }
    j["units"] = units;

    Json types = Json::array();
    for (const auto& [id, t] : state.source_types) {
        types.push_back(Json{{"id", id.str()}, {"singleton", t.singleton}});
    }
    j["source_types"] = types;

    Json sources = Json::array();
    for (const auto& [id, s] : state.sources) {
        Json sj;
        sj["id"] = id.str();
        sj["type"] = s.type.str();
        sj["owner"] = s.owner.str();
        sj["descriptor"] = s.descriptor;
        sj["depends_on"] = ids_json(s.depends_on);
        sj["management_function"] = s.management_function;
        sources.push_back(sj);
    }
    j["sources"] = sources;

    Json themes = Json::array();
    for (const auto& [id, t] : state.themes) {
        Json tj;
        tj["id"] = id.str();
        tj["maintainer"] = t.maintainer.str();
        tj["name"] = t.name;
        if (t.cluster) tj["cluster"] = *t.cluster;
        themes.push_back(tj);
    }
    j["themes"] = themes;

    Json uses = Json::array();
    for (const auto& ur : state.use_relations) {
        uses.push_back(Json{{"user", ur.user.str()},
                            {"source", ur.source.str()},
                            {"theme", ur.theme.str()}});
    }
    j["use_relations"] = uses;

    Json contracts = Json::array();
    for (const auto& [id, c] : state.contracts) {
        Json cj;
        cj["id"] = id.str();
        cj["provider"] = c.provider.str();
        cj["consumer"] = c.consumer.str();
        cj["theme"] = c.theme.str();
        cj["period_start"] = c.period_start;
        cj["period_end"] = c.period_end;
        cj["termination_protocol"] = c.termination_protocol;
        cj["notice_interval"] = c.notice_interval;
        cj["compensation"] = compensation_name(c.compensation);
        cj["intentional_commitment_terms"] = commitment_terms_name(c.intentional_commitment_terms);
        contracts.push_back(cj);
    }
    j["contracts"] = contracts;

    Json commitments = Json::array();
    for (const auto& [id, cm] : state.commitments) {
        commitments.push_back(Json{{"id", id.str()},
                                   {"committed_unit", cm.committed_unit.str()},
                                   {"source", cm.source.str()},
                                   {"origin", cm.origin}});
    }
    j["commitments"] = commitments;

    Json sourcements = Json::array();
    for (const auto& [id, s] : state.sourcements) sourcements.push_back(sourcement_to_json(s));
    j["sourcements"] = sourcements;

    Json ucs = Json::array();
    for (const auto& [consumer, provider] : state.unit_commitments) {
        ucs.push_back(Json{{"consumer", consumer.str()}, {"provider", provider.str()}});
    }
    j["unit_commitments"] = ucs;

    j["timestamp"] = state.timestamp;
    return j;
}

WorldState state_from_json(const Json& j) {
    WorldState w;
    if (!j.is_object()) bad_shape("top level must be an object");
    for (const auto& uj : need(j, "units")) {
        Unit u;
        u.id = UnitId(need_str(uj, "id"));
        u.name = uj.value("name", u.id.str());
        if (uj.contains("parent")) u.parent = UnitId(uj["parent"].get<std::string>());
        if (uj.contains("mission")) u.mission = uj["mission"].get<std::string>();
        w.units.emplace(u.id, std::move(u));
    }
    for (const auto& tj : need(j, "source_types")) {
        SourceType t;
        t.id = SourceTypeId(need_str(tj, "id"));
        t.singleton = tj.value("singleton", false);
        w.source_types.emplace(t.id, std::move(t));
    }
    for (const auto& sj : need(j, "sources")) {
        Source s;
        s.id = SourceId(need_str(sj, "id"));
        s.type = SourceTypeId(need_str(sj, "type"));
        s.owner = UnitId(need_str(sj, "owner"));
        s.descriptor = sj.value("descriptor", std::string{});
        if (sj.contains("depends_on")) s.depends_on = ids_from<SourceId>(sj["depends_on"]);
        s.management_function = sj.value("management_function", false);
        w.sources.emplace(s.id, std::move(s));
    }
    for (const auto& tj : need(j, "themes")) {
        Theme t;
        t.id = ThemeId(need_str(tj, "id"));
        t.maintainer = UnitId(need_str(tj, "maintainer"));
        t.name = tj.value("name", t.id.str());
        if (tj.contains("cluster")) t.cluster = tj["cluster"].get<std::string>();
        w.themes.emplace(t.id, std::move(t));
    }
    if (j.contains("use_relations")) {
        for (const auto& uj : j["use_relations"]) {
            w.add_use(UseRelation{UnitId(need_str(uj, "user")), SourceId(need_str(uj, "source")),
                                  ThemeId(need_str(uj, "theme"))});
        }
    }
    if (j.contains("contracts")) {
        for (const auto& cj : j["contracts"]) {
            ServiceContract c;
            c.id = ContractId(need_str(cj, "id"));
            c.provider = UnitId(need_str(cj, "provider"));
            c.consumer = UnitId(need_str(cj, "consumer"));
            c.theme = ThemeId(need_str(cj, "theme"));
            c.period_start = cj.value("period_start", Timestamp{0});
            c.period_end = cj.value("period_end", Timestamp{0});
            c.termination_protocol = cj.value("termination_protocol", std::string{});
            c.notice_interval = cj.value("notice_interval", Timestamp{0});
            auto comp = compensation_from_name(cj.value("compensation", std::string{"none"}));
            if (!comp) bad_shape("unknown compensation tag");
            c.compensation = *comp;
            auto terms = commitment_terms_from_name(
                cj.value("intentional_commitment_terms", std::string{"unspecified"}));
            if (!terms) bad_shape("unknown intentional_commitment_terms tag");
            c.intentional_commitment_terms = *terms;
            w.contracts.emplace(c.id, std::move(c));
        }
    }
    if (j.contains("commitments")) {
        for (const auto& cj : j["commitments"]) {
            SourceCommitment cm;
            cm.id = CommitmentId(need_str(cj, "id"));
            cm.committed_unit = UnitId(need_str(cj, "committed_unit"));
            cm.source = SourceId(need_str(cj, "source"));
            cm.origin = cj.value("origin", std::string{});
            w.commitments.emplace(cm.id, std::move(cm));
        }
    }
    if (j.contains("sourcements")) {
        for (const auto& sj : j["sourcements"]) {
            Sourcement s = sourcement_from_json(sj);
            std::string id = s.id;
            w.sourcements.emplace(std::move(id), std::move(s));
        }
    }
    if (j.contains("unit_commitments")) {
        for (const auto& uj : j["unit_commitments"]) {
            w.unit_commitments.emplace(UnitId(need_str(uj, "consumer")),
                                       UnitId(need_str(uj, "provider")));
        }
    }
    w.timestamp = j.value("timestamp", Timestamp{0});
    return w;
}

Json event_to_json(const HistoryEvent& e) {
    Json j;
    j["seq"] = e.seq;
    j["time"] = e.time;
    j["kind"] = e.kind;
    j["actor"] = e.actor.str();
    Json p = Json::object();
    if (!e.params.moves.empty()) {
        Json moves = Json::array();
        for (const auto& m : e.params.moves) {
            moves.push_back(Json{{"source", m.source.str()},
                                 {"from", m.from.str()},
                                 {"to", m.to.str()}});
        }
        p["moves"] = moves;
    }
    if (!e.params.created_sources.empty()) p["created_sources"] = ids_json(e.params.created_sources);
    if (!e.params.removed_sources.empty()) p["removed_sources"] = ids_json(e.params.removed_sources);
    if (e.params.contract_created) p["contract_created"] = e.params.contract_created->str();
    if (e.params.contract_terminated) p["contract_terminated"] = e.params.contract_terminated->str();
    if (!e.params.commitments_created.empty())
        p["commitments_created"] = ids_json(e.params.commitments_created);
    if (!e.params.commitments_discharged.empty())
        p["commitments_discharged"] = ids_json(e.params.commitments_discharged);
    if (e.params.theme_moved) p["theme_moved"] = e.params.theme_moved->str();
    if (e.params.theme_from) p["theme_from"] = e.params.theme_from->str();
    if (e.params.theme_to) p["theme_to"] = e.params.theme_to->str();
    if (e.params.subject_type) p["subject_type"] = e.params.subject_type->str();
    if (e.params.subject_sourcement) p["subject_sourcement"] = *e.params.subject_sourcement;
    if (!e.params.counterparties.empty()) p["counterparties"] = ids_json(e.params.counterparties);
    if (e.params.prev_provider) p["prev_provider"] = e.params.prev_provider->str();
    if (e.params.new_provider) p["new_provider"] = e.params.new_provider->str();
    if (e.params.mission_tie) p["mission_tie"] = *e.params.mission_tie;
    if (e.params.compensation != Compensation::None)
        p["compensation"] = compensation_name(e.params.compensation);
    j["parameters"] = p;
    j["pre_digest"] = e.pre_digest;
    j["post_digest"] = e.post_digest;
    return j;
}

HistoryEvent event_from_json(const Json& j) {
    HistoryEvent e;
    e.seq = need(j, "seq").get<std::int64_t>();
    e.time = j.value("time", Timestamp{0});
    e.kind = need_str(j, "kind");
    e.actor = UnitId(need_str(j, "actor"));
    const Json p = j.value("parameters", Json::object());
    if (p.contains("moves")) {
        for (const auto& mj : p["moves"]) {
            e.params.moves.push_back(SourceMove{SourceId(need_str(mj, "source")),
                                                UnitId(need_str(mj, "from")),
                                                UnitId(need_str(mj, "to"))});
        }
    }
    if (p.contains("created_sources"))
        e.params.created_sources = ids_from<SourceId>(p["created_sources"]);
    if (p.contains("removed_sources"))
        e.params.removed_sources = ids_from<SourceId>(p["removed_sources"]);
    if (p.contains("contract_created"))
        e.params.contract_created = ContractId(p["contract_created"].get<std::string>());
    if (p.contains("contract_terminated"))
        e.params.contract_terminated = ContractId(p["contract_terminated"].get<std::string>());
    if (p.contains("commitments_created"))
        e.params.commitments_created = ids_from<CommitmentId>(p["commitments_created"]);
    if (p.contains("commitments_discharged"))
        e.params.commitments_discharged = ids_from<CommitmentId>(p["commitments_discharged"]);
    if (p.contains("theme_moved")) e.params.theme_moved = ThemeId(p["theme_moved"].get<std::string>());
    if (p.contains("theme_from")) e.params.theme_from = UnitId(p["theme_from"].get<std::string>());
    if (p.contains("theme_to")) e.params.theme_to = UnitId(p["theme_to"].get<std::string>());
    if (p.contains("subject_type"))
        e.params.subject_type = SourceTypeId(p["subject_type"].get<std::string>());
    if (p.contains("subject_sourcement"))
        e.params.subject_sourcement = p["subject_sourcement"].get<std::string>();
    if (p.contains("counterparties")) e.params.counterparties = ids_from<UnitId>(p["counterparties"]);
    if (p.contains("prev_provider"))
        e.params.prev_provider = UnitId(p["prev_provider"].get<std::string>());
    if (p.contains("new_provider"))
        e.params.new_provider = UnitId(p["new_provider"].get<std::string>());
    if (p.contains("mission_tie")) e.params.mission_tie = p["mission_tie"].get<bool>();
    if (p.contains("compensation")) {
        auto comp = compensation_from_name(p["compensation"].get<std::string>());
        if (!comp) bad_shape("unknown compensation tag");
        e.params.compensation = *comp;
    }
    e.pre_digest = j.value("pre_digest", std::string{});
    e.post_digest = j.value("post_digest", std::string{});
    return e;
}

Json log_to_json(const HistoryLog& log) {
    Json a = Json::array();
    for (const auto& e : log) a.push_back(event_to_json(e));
    return a;
}

HistoryLog log_from_json(const Json& j) {
    HistoryLog log;
    for (const auto& ej : j) log.push_back(event_from_json(ej));
    return log;
}

Json business_to_json(const BusinessConfig& b) {
    Json j;
    j["unit"] = b.unit.str();
    j["operational_options"] = strings_json(b.operational_options);
    j["business_category"] = b.business_category;
    auto groups = [](const std::vector<BusinessRefGroup>& gs) {
        Json a = Json::array();
        for (const auto& g : gs) {
            Json gj;
            gj["label"] = g.label;
            if (!g.note.empty()) gj["note"] = g.note;
            gj["refs"] = strings_json(g.refs);
            a.push_back(gj);
        }
        return a;
    };
    j["profit_centers"] = groups(b.profit_centers);
    j["bleeders"] = groups(b.bleeders);
    j["market_acquisition_motives"] = strings_json(b.market_acquisition_motives);
    return j;
}

Json contract_config_to_json(const ContractConfig& c) {
    Json j;
    j["scope"] = ids_json(c.scope);
    j["general_law"] = strings_json(c.general_law);
    j["rules_of_trade"] = strings_json(c.rules_of_trade);
    j["sustainability_charters"] = strings_json(c.sustainability_charters);
    Json promises = Json::array();
    for (const auto& p : c.promises) {
        promises.push_back(Json{{"id", p.id}, {"from", p.from.str()}, {"to", p.to.str()},
                                {"text", p.text}});
    }
    j["promises"] = promises;
    Json agreements = Json::array();
    for (const auto& a : c.agreements) {
        agreements.push_back(Json{{"id", a.id}, {"promise_a", a.promise_a},
                                  {"promise_b", a.promise_b}});
    }
    j["agreements"] = agreements;
    j["contracts"] = ids_json(c.contracts);
    return j;
}

Json diagnostic_to_json(const Diagnostic& d) {
    Json j;
    j["severity"] = severity_name(d.severity);
    j["code"] = d.code;
    j["entities"] = strings_json(d.entities);
    j["message"] = d.message;
    if (d.line > 0) {
        j["line"] = d.line;
        j["column"] = d.column;
    }
    if (!d.excerpt.empty()) j["excerpt"] = d.excerpt;
    return j;
}

Json diagnostics_to_json(const Diagnostics& ds) {
    Json a = Json::array();
    for (const auto& d : ds) a.push_back(diagnostic_to_json(d));
    return a;
}

}  // namespace stratos
