#include <sstream>
#include <type_traits>

#include "core/digest.hpp"
#include "dsl/dsl.hpp"

namespace stratos {

namespace {

std::string quoted(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    out += '"';
    return out;
}

bool bare_ident(const std::string& s) {
    if (s.empty()) return false;
    auto head = [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
    };
    auto tail = [&](char c) { return head(c) || (c >= '0' && c <= '9'); };
    if (!head(s[0])) return false;
    for (char c : s.substr(1)) {
        if (!tail(c)) return false;
    }
    return true;
}

bool bare_number(const std::string& s) {
    std::size_t i = (!s.empty() && s[0] == '-') ? 1 : 0;
    if (i >= s.size()) return false;
    bool slash_seen = false;
    for (; i < s.size(); ++i) {
        char c = s[i];
        if (c == '/' && !slash_seen && i + 1 < s.size()) {
            slash_seen = true;
            continue;
        }
        if (c < '0' || c > '9') return false;
    }
    return true;
}

template <typename Ids>
std::string id_list(const Ids& ids) {
    std::string out = "[";
    bool first = true;
    for (const auto& id : ids) {
        if (!first) out += ", ";
        if constexpr (std::is_same_v<std::decay_t<decltype(id)>, std::string>) {
            out += id;
        } else {
            out += id.str();
        }
        first = false;
    }
    out += "]";
    return out;
}

std::string bool_word(bool b) { return b ? "true" : "false"; }

void print_service(std::ostringstream& o, const ServicePayload& p) {
    o << "service={ id=" << p.id.str() << " theme=" << p.theme.str() << " period=("
      << p.period_start << "," << p.period_end << ")";
    if (p.notice_interval != 0) o << " notice=" << p.notice_interval;
    if (!p.termination_protocol.empty()) o << " termination=" << quoted(p.termination_protocol);
    if (p.compensation != Compensation::ForContractDuration) {
        o << " compensation=" << compensation_name(p.compensation);
    }
    if (p.intentional_commitment_terms != CommitmentTerms::Unspecified) {
        o << " commitment_terms=" << commitment_terms_name(p.intentional_commitment_terms);
    }
    o << " }";
}

void print_source_payload(std::ostringstream& o, const SourcePayload& p) {
    o << "source={ id=" << p.id.str() << " type=" << p.type.str();
    if (!p.descriptor.empty()) o << " descriptor=" << quoted(p.descriptor);
    if (!p.depends_on.empty()) o << " depends_on=" << id_list(p.depends_on);
    if (p.management_function) o << " management_function=true";
    if (p.use_for) o << " use_for=" << p.use_for->str();
    o << " }";
}

void print_script_item(std::ostringstream& o, const ScriptItem& item) {
    const TransformationSpec& s = item.spec;
    o << "apply " << transform_kind_name(s.kind) << " actor=" << s.actor.str();
    if (item.time != 0) o << " time=" << item.time;
    if (!s.counterparties.empty()) o << " to=" << id_list(s.counterparties);
    if (!s.subject.sources.empty()) o << " sources=" << id_list(s.subject.sources);
    if (s.subject.type) o << " type=" << s.subject.type->str();
    if (s.subject.theme) o << " theme=" << s.subject.theme->str();
    if (s.subject.sourcement) o << " sourcement=" << *s.subject.sourcement;
    if (s.service) {
        o << ' ';
        print_service(o, *s.service);
    }
    if (s.source_payload) {
        o << ' ';
        print_source_payload(o, *s.source_payload);
    }
    if (!s.commitments_to_create.empty()) o << " commit=" << id_list(s.commitments_to_create);
    if (s.compensation != Compensation::None) {
        o << " compensation=" << compensation_name(s.compensation);
    }
    if (!s.assignments.empty()) {
        o << " assign=[";
        bool first = true;
        for (const auto& [src, unit] : s.assignments) {
            if (!first) o << ", ";
            o << src.str() << "->" << unit.str();
            first = false;
        }
        o << "]";
    }
    if (s.prior_contract) o << " prior_contract=" << s.prior_contract->str();
    if (s.mission_tie) o << " mission_tie=" << bool_word(*s.mission_tie);
    if (!s.partition.empty()) {
        o << " partition=[";
        bool first = true;
        for (const auto& part : s.partition) {
            if (!first) o << ", ";
            o << id_list(part);
            first = false;
        }
        o << "]";
    }
    if (item.expect) o << " expect=" << *item.expect;
    o << '\n';
}

void print_assertion(std::ostringstream& o, const AssertionItem& a) {
    o << "assert";
    for (const auto& q : a.query) o << ' ' << q;
    o << " == ";
    if (bare_ident(a.expected) || bare_number(a.expected)) {
        o << a.expected;
    } else {
        o << quoted(a.expected);
    }
    o << '\n';
}

}  // namespace

std::string print_scenario(const Scenario& s) {
    std::ostringstream o;
    const WorldState& w = s.world;

    for (const auto& [id, u] : w.units) {
        o << "unit " << id.str();
        std::ostringstream body;
        if (!u.name.empty()) body << " name=" << quoted(u.name);
        if (u.parent) body << " parent=" << u.parent->str();
        if (u.mission) body << " mission=" << quoted(*u.mission);
        std::string b = body.str();
        if (b.empty()) {
            o << " {}\n";
        } else {
            o << " {" << b << " }\n";
        }
    }
    for (const auto& [id, st] : w.source_types) {
        o << "source_type " << id.str() << " singleton=" << bool_word(st.singleton) << '\n';
    }
    for (const auto& [id, src] : w.sources) {
        o << "source " << id.str() << " : " << src.type.str() << " owned_by "
          << src.owner.str();
        if (!src.descriptor.empty()) o << " descriptor=" << quoted(src.descriptor);
        if (!src.depends_on.empty()) o << " depends_on=" << id_list(src.depends_on);
        if (src.management_function) o << " management_function=true";
        o << '\n';
    }
    for (const auto& [id, t] : w.themes) {
        o << "theme " << id.str() << " by " << t.maintainer.str();
        if (!t.name.empty()) o << " name=" << quoted(t.name);
        if (t.cluster) o << " cluster=" << quoted(*t.cluster);
        o << '\n';
    }
    for (const auto& ur : w.use_relations) {
        o << "use " << ur.user.str() << ' ' << ur.source.str() << " for " << ur.theme.str()
          << '\n';
    }
    for (const auto& [id, c] : w.contracts) {
        o << "contract " << id.str() << " provider=" << c.provider.str()
          << " consumer=" << c.consumer.str() << " theme=" << c.theme.str() << " period=("
          << c.period_start << "," << c.period_end << ")";
        if (c.notice_interval != 0) o << " notice=" << c.notice_interval;
        if (!c.termination_protocol.empty()) {
            o << " termination=" << quoted(c.termination_protocol);
        }
        if (c.compensation != Compensation::ForContractDuration) {
            o << " compensation=" << compensation_name(c.compensation);
        }
        if (c.intentional_commitment_terms != CommitmentTerms::Unspecified) {
            o << " commitment_terms="
              << commitment_terms_name(c.intentional_commitment_terms);
        }
        o << '\n';
    }
    for (const auto& [id, cm] : w.commitments) {
        o << "commit " << cm.committed_unit.str() << " to " << cm.source.str();
        const std::string& origin = cm.origin;
        if (origin.rfind("contract:", 0) == 0 && bare_ident(origin.substr(9))) {
            o << " via " << origin.substr(9);
        } else if (origin != "declared") {
            o << " origin=" << quoted(origin);
        }
        o << '\n';
    }
    for (const auto& [consumer, provider] : w.unit_commitments) {
        o << "unit_commitment " << consumer.str() << " to " << provider.str() << '\n';
    }
    for (const auto& [id, sm] : w.sourcements) {
        o << "sourcement " << id << " of " << sm.principal.str() << " themes="
          << id_list(sm.themes) << " {\n";
        for (const auto& b : sm.basics) {
            o << "  basic " << b.owner.str() << " = " << id_list(b.sources) << '\n';
        }
        const AttributeRecord& a = sm.attributes;
        if (a.thematic_operations) {
            o << "  thematic_operations = " << quoted(*a.thematic_operations) << '\n';
        }
        if (!a.location.empty()) o << "  location = " << id_list(a.location) << '\n';
        if (!a.facilities.empty()) o << "  facilities = " << id_list(a.facilities) << '\n';
        if (!a.operational_staff.empty()) {
            o << "  operational_staff = " << id_list(a.operational_staff) << '\n';
        }
        if (!a.managing_staff.empty()) {
            o << "  managing_staff = " << id_list(a.managing_staff) << '\n';
        }
        if (!a.contract_management_staff.empty()) {
            o << "  contract_management_staff = " << id_list(a.contract_management_staff)
              << '\n';
        }
        if (!a.directing_staff.empty()) {
            o << "  directing_staff = " << id_list(a.directing_staff) << '\n';
        }
        if (a.intellectual_property) {
            o << "  intellectual_property = " << quoted(*a.intellectual_property) << '\n';
        }
        if (a.data_knowledge_software) {
            o << "  data_knowledge_software = " << quoted(*a.data_knowledge_software) << '\n';
        }
        if (sm.unstable_deadline) o << "  unstable_until = " << *sm.unstable_deadline << '\n';
        o << "}\n";
    }
    for (const auto& b : s.business) {
        o << "business " << b.unit.str() << " {\n";
        if (!b.business_category.empty()) {
            o << "  category = " << quoted(b.business_category) << '\n';
        }
        for (const auto& opt : b.operational_options) {
            o << "  option = " << quoted(opt) << '\n';
        }
        for (const auto& m : b.market_acquisition_motives) {
            o << "  motive = " << quoted(m) << '\n';
        }
        auto groups = [&](const std::vector<BusinessRefGroup>& gs, const char* kw) {
            for (const auto& g : gs) {
                o << "  " << kw << ' ' << g.label << " = " << id_list(g.refs);
                if (!g.note.empty()) o << " note=" << quoted(g.note);
                o << '\n';
            }
        };
        groups(b.profit_centers, "profit_center");
        groups(b.bleeders, "bleeder");
        o << "}\n";
    }
    for (const auto& c : s.contract_overlays) {
        o << "contract_overlay {\n";
        if (!c.scope.empty()) o << "  scope = " << id_list(c.scope) << '\n';
        for (const auto& l : c.general_law) o << "  law = " << quoted(l) << '\n';
        for (const auto& r : c.rules_of_trade) o << "  trade_rule = " << quoted(r) << '\n';
        for (const auto& ch : c.sustainability_charters) {
            o << "  charter = " << quoted(ch) << '\n';
        }
        for (const auto& p : c.promises) {
            o << "  promise " << p.id << ' ' << p.from.str() << " -> " << p.to.str() << ' '
              << quoted(p.text) << '\n';
        }
        for (const auto& a : c.agreements) {
            o << "  agreement " << a.id << " = (" << a.promise_a << ", " << a.promise_b
              << ")\n";
        }
        for (const auto& cid : c.contracts) o << "  contract " << cid.str() << '\n';
        o << "}\n";
    }
    for (const auto& [id, in] : s.douts) {
        o << "douts " << id << " {\n";
        o << "  service_contracted = " << bool_word(in.service_contracted) << '\n';
        o << "  sources_transferred = " << bool_word(in.sources_transferred) << '\n';
        o << "  independent_markets = " << bool_word(in.independent_markets_as_economic)
          << '\n';
        o << "  initial_production = "
          << bool_word(in.initial_production_by_transferred_sources) << '\n';
        const LiftConditions& lc = in.lift_conditions;
        if (lc.process_stable) o << "  lift process_stable\n";
        if (lc.more_economic_than_split) o << "  lift more_economic_than_split\n";
        if (lc.incorporation_plausible) o << "  lift incorporation_plausible\n";
        if (lc.risk_enabled_by_contract) o << "  lift risk_enabled_by_contract\n";
        if (lc.positive_asset_value_shared) o << "  lift positive_asset_value_shared\n";
        o << "  service_volume = " << in.service_volume.str() << '\n';
        o << "  transferred_volume = " << in.transferred_production_volume.str() << '\n';
        if (in.multi_party) o << "  multi_party = true\n";
        o << "}\n";
    }
    for (const auto& [id, p] : s.patterns) {
        o << "pattern " << id << " from sourcement " << p.sourcement << " vary "
          << id_list(p.vary) << '\n';
    }
    for (const auto& [id, l] : s.lots) {
        o << "lot " << id << " = " << id_list(l.patterns) << '\n';
    }
    for (const auto& [id, b] : s.bids) {
        o << "bid " << id << " on " << b.lot;
        if (!b.bindings.empty()) {
            o << " bind ";
            bool first = true;
            for (const auto& [k, v] : b.bindings) {
                if (!first) o << ", ";
                o << k << '=' << v;
                first = false;
            }
        }
        if (!b.offered_insourcing.empty()) {
            o << " offering " << id_list(b.offered_insourcing);
        }
        o << '\n';
    }

    for (std::size_t i = 0; i <= s.script.size(); ++i) {
        for (const auto& a : s.assertions) {
            if (a.after_step == i || (i == s.script.size() && a.after_step > i)) {
                print_assertion(o, a);
            }
        }
        if (i < s.script.size()) print_script_item(o, s.script[i]);
    }
    return o.str();
}

std::string scenario_digest(const Scenario& s) { return fnv1a_hex(print_scenario(s)); }

}  // namespace stratos
