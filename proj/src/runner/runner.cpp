#include "runner/runner.hpp"

#include <optional>
#include <sstream>

#include "core/digest.hpp"
#include "core/error.hpp"
#include "core/validate.hpp"
#include "douts/douts.hpp"
#include "relations/relations.hpp"
#include "transformations/transformations.hpp"

namespace stratos {

namespace {

std::string bool_word(bool b) { return b ? "true" : "false"; }

std::optional<std::string> normalized_rational(const std::string& s) {
    std::size_t slash = s.find('/');
    try {
        if (slash == std::string::npos) {
            std::size_t used = 0;
            long long v = std::stoll(s, &used);
            if (used != s.size()) return std::nullopt;
            return Rational::whole(v).str();
        }
        std::size_t used_n = 0, used_d = 0;
        long long n = std::stoll(s.substr(0, slash), &used_n);
        long long d = std::stoll(s.substr(slash + 1), &used_d);
        if (used_n != slash || used_d != s.size() - slash - 1 || d == 0) return std::nullopt;
        return Rational(n, d).str();
    } catch (...) {
        return std::nullopt;
    }
}

bool values_agree(const std::string& expected, const std::string& actual) {
    if (expected == actual) return true;
    auto e = normalized_rational(expected);
    auto a = normalized_rational(actual);
    return e && a && *e == *a;
}

std::string query_text(const std::vector<std::string>& q) {
    std::string out;
    for (const auto& t : q) {
        if (!out.empty()) out += ' ';
        out += t;
    }
    return out;
}

[[noreturn]] void bad_query(const std::vector<std::string>& q, const std::string& why) {
    throw Error(Errc::InvalidInput, "UNKNOWN_QUERY",
                "cannot evaluate '" + query_text(q) + "': " + why);
}

std::string eval(const Scenario& sc, const WorldState& w, const HistoryLog& log,
                 const std::vector<std::string>& q, const WorldState* last_pre,
                 const UnitId* last_actor) {
    if (q.empty()) bad_query(q, "empty query");
    const std::string& head = q[0];
    auto want = [&](std::size_t n) {
        if (q.size() != n + 1) bad_query(q, "wrong number of arguments");
    };
    if (head == "selfsourcing") {
        want(2);
        return bool_word(selfsourcing_for_source(w, UnitId(q[1]), SourceId(q[2])));
    }
    if (head == "non_selfsourcing") {
        want(2);
        return bool_word(non_selfsourcing_for_source(w, UnitId(q[1]), SourceId(q[2])));
    }
    if (head == "uses") {
        want(2);
        return bool_word(uses(w, UnitId(q[1]), SourceId(q[2])));
    }
    if (head == "has_use") {
        want(3);
        return bool_word(w.has_use(UseRelation{UnitId(q[1]), SourceId(q[2]), ThemeId(q[3])}));
    }
    if (head == "owner") {
        want(1);
        return w.owner_of(SourceId(q[1])).str();
    }
    if (head == "committed") {
        want(2);
        return bool_word(w.find_commitment(UnitId(q[1]), SourceId(q[2])) != nullptr);
    }
    if (head == "type_status") {
        want(2);
        return sourcing_tag_name(type_status(w, UnitId(q[1]), SourceTypeId(q[2])).tag);
    }
    if (head == "selfsourcing_type" || head == "partial_selfsourcing_type" ||
        head == "non_selfsourcing_type" || head == "partial_non_selfsourcing_type") {
        want(2);
        TypeStatus ts = type_status(w, UnitId(q[1]), SourceTypeId(q[2]));
        if (head == "selfsourcing_type") return bool_word(ts.selfsourcing_type);
        if (head == "partial_selfsourcing_type") return bool_word(ts.partial_selfsourcing_type);
        if (head == "non_selfsourcing_type") return bool_word(ts.non_selfsourcing_type);
        return bool_word(ts.partial_non_selfsourcing_type);
    }
    if (head == "used_count") {
        want(2);
        return std::to_string(used_sources_of_type(w, UnitId(q[1]), SourceTypeId(q[2])).size());
    }
    if (head == "closure_size") {
        want(1);
        return std::to_string(dependency_closure(w, SourceId(q[1])).size());
    }
    if (head == "has_unit") {
        want(1);
        return bool_word(w.has_unit(UnitId(q[1])));
    }
    if (head == "has_source") {
        want(1);
        return bool_word(w.has_source(SourceId(q[1])));
    }
    if (head == "has_contract") {
        want(1);
        return bool_word(w.has_contract(ContractId(q[1])));
    }
    if (head == "douts") {
        want(1);
        auto it = sc.douts.find(q[1]);
        if (it == sc.douts.end()) throw_unknown("douts block", q[1]);
        return score(it->second).value.str();
    }
    if (head == "digest") {
        want(0);
        return state_digest(w);
    }
    if (head == "history_length") {
        want(0);
        return std::to_string(log.size());
    }
    if (head == "provenance") {
        want(2);
        return provenance_kind_name(provenance(log, w, UnitId(q[1]), SourceId(q[2])).kind);
    }
    if (head == "provenance_units") {
        want(2);
        Provenance p = provenance(log, w, UnitId(q[1]), SourceId(q[2]));
        std::string out;
        for (const auto& u : p.units) {
            if (!out.empty()) out += ',';
            out += u.str();
        }
        return out;
    }
    if (head == "service_characteristic") {
        want(1);
        return service_characteristic_name(service_characteristic(w, ContractId(q[1])));
    }
    if (head == "classified") {
        want(1);
        if (!last_pre || !last_actor) bad_query(q, "no transformation ran before this point");
        auto kinds = classify(*last_pre, w, *last_actor);
        for (auto k : kinds) {
            if (q[1] == classified_kind_name(k)) return "true";
        }
        return "false";
    }
    if (head == "commitment_class") {
        want(1);
        if (!last_pre) bad_query(q, "no transformation ran before this point");
        return commitment_class_name(classify_commitments(*last_pre, w, UnitId(q[1])));
    }
    bad_query(q, "unknown query head");
}

}  // namespace

std::string evaluate_query(const Scenario& sc, const WorldState& state, const HistoryLog& log,
                           const std::vector<std::string>& query) {
    return eval(sc, state, log, query, nullptr, nullptr);
}

RunReport run_scenario(const Scenario& sc, const RunOptions& opts) {
    RunReport r;
    r.diagnostics = validate_all(sc.world, sc.business, sc.contract_overlays);
    if (has_errors(r.diagnostics)) {
        r.final_state = sc.world;
        return r;
    }

    WorldState state = sc.world;
    HistoryLog log;
    std::optional<WorldState> last_pre;
    std::optional<UnitId> last_actor;
    bool halted = false;

    if (opts.trace) r.trace.push_back(state_digest(state));

    auto check_assertions = [&](std::size_t position, bool final_pass) {
        for (const auto& a : sc.assertions) {
            bool due = final_pass ? a.after_step >= position : a.after_step == position;
            if (!due) continue;
            AssertionResult res;
            res.item = a;
            try {
                res.actual = eval(sc, state, log, a.query,
                                  last_pre ? &*last_pre : nullptr,
                                  last_actor ? &*last_actor : nullptr);
                res.passed = values_agree(a.expected, res.actual);
                if (!res.passed) {
                    res.message = "expected " + a.expected + ", got " + res.actual;
                }
            } catch (const Error& e) {
                res.passed = false;
                res.message = e.what();
            }
            (res.passed ? r.assertions_passed : r.assertions_failed) += 1;
            r.assertions.push_back(std::move(res));
        }
    };

    std::size_t i = 0;
    for (; i < sc.script.size(); ++i) {
        check_assertions(i, false);
        const ScriptItem& item = sc.script[i];
        StepResult step;
        step.index = i;
        step.kind = transform_kind_name(item.spec.kind);
        try {
            Applied out = apply(state, item.spec, log,
                                item.time != 0 ? std::optional<Timestamp>(item.time)
                                               : std::nullopt);
            if (item.expect) {
                step.ok = false;
                step.detail = "expected failure " + *item.expect +
                              " but the transformation succeeded";
            } else {
                last_pre = state;
                last_actor = item.spec.actor;
                state = std::move(out.state);
                log = std::move(out.log);
                step.ok = true;
                step.executed = true;
                ++r.steps_executed;
            }
        } catch (const Error& e) {
            std::string code = e.detail().empty() ? errc_name(e.code()) : e.detail();
            if (item.expect && code == *item.expect) {
                step.ok = true;
                step.detail = code;
            } else {
                step.ok = false;
                step.detail = code;
            }
        }
        step.post_digest = state_digest(state);
        if (opts.trace) r.trace.push_back(step.post_digest);
        bool failed = !step.ok;
        r.steps.push_back(std::move(step));
        if (failed && !opts.keep_going) {
            halted = true;
            ++i;
            break;
        }
    }
    check_assertions(halted ? i : sc.script.size(), true);

    r.final_state = state;
    r.log = log;
    r.final_digest = state_digest(state);
    bool steps_ok = true;
    for (const auto& s : r.steps) steps_ok = steps_ok && s.ok;
    r.ok = steps_ok && r.assertions_failed == 0 && !has_errors(r.diagnostics) &&
           r.steps.size() == sc.script.size();
    return r;
}

Json report_to_json(const RunReport& r) {
    Json j;
    j["path"] = r.path;
    j["ok"] = r.ok;
    j["steps_executed"] = r.steps_executed;
    j["assertions_passed"] = r.assertions_passed;
    j["assertions_failed"] = r.assertions_failed;
    j["final_digest"] = r.final_digest;
    Json steps = Json::array();
    for (const auto& s : r.steps) {
        Json js;
        js["index"] = s.index;
        js["kind"] = s.kind;
        js["ok"] = s.ok;
        js["executed"] = s.executed;
        if (!s.detail.empty()) js["detail"] = s.detail;
        js["post_digest"] = s.post_digest;
        steps.push_back(js);
    }
    j["steps"] = steps;
    Json asserts = Json::array();
    for (const auto& a : r.assertions) {
        Json ja;
        ja["query"] = query_text(a.item.query);
        ja["expected"] = a.item.expected;
        ja["actual"] = a.actual;
        ja["passed"] = a.passed;
        ja["after_step"] = a.item.after_step;
        if (a.item.line) ja["line"] = a.item.line;
        if (!a.message.empty()) ja["message"] = a.message;
        asserts.push_back(ja);
    }
    j["assertions"] = asserts;
    if (!r.diagnostics.empty()) j["diagnostics"] = diagnostics_to_json(r.diagnostics);
    if (!r.trace.empty()) j["trace"] = r.trace;
    return j;
}

}  // namespace stratos
