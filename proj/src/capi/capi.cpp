#define STRATOS_API __attribute__((visibility("default")))
#include "stratos/stratos.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "core/digest.hpp"
#include "core/error.hpp"
#include "core/json_io.hpp"
#include "douts/douts.hpp"
#include "dsl/dsl.hpp"
#include "patterns/patterns.hpp"
#include "runner/runner.hpp"
#include "transformations/transformations.hpp"
#include "transitions/transitions.hpp"

using namespace stratos;

struct stratos_scenario {
    ParseResult parsed;
    std::string path;
};

struct stratos_run {
    Scenario scenario;  // keeps queries valid after the source handle dies
    RunReport report;
};

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
    char* p = static_cast<char*>(std::malloc(s.size() + 1));
    if (p) std::memcpy(p, s.c_str(), s.size() + 1);
    return p;
}

int fail_arg(const char* message) {
    g_last_error = message;
    return STRATOS_E_INVALID_ARG;
}

template <typename F>
int guarded(F&& f) {
    try {
        return f();
    } catch (const Error& e) {
        g_last_error = e.what();
        switch (e.code()) {
            case Errc::InvalidInput:
            case Errc::UnknownEntity:
                return STRATOS_E_INVALID_ARG;
            case Errc::Io:
                return STRATOS_E_IO;
            default:
                return STRATOS_E_DOMAIN;
        }
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return STRATOS_E_DOMAIN;
    } catch (...) {
        g_last_error = "unknown failure";
        return STRATOS_E_DOMAIN;
    }
}

int give(char** out, const std::string& value) {
    *out = dup_string(value);
    if (!*out) {
        g_last_error = "out of memory";
        return STRATOS_E_DOMAIN;
    }
    return STRATOS_OK;
}

int give_json(char** out, const Json& j) { return give(out, j.dump() + "\n"); }

// State and log right before script step `step`; throws on any failure along
// the way so plan and verify see exactly what a run would see.
std::pair<WorldState, HistoryLog> replay_until(const Scenario& sc, std::size_t step) {
    WorldState state = sc.world;
    HistoryLog log;
    for (std::size_t i = 0; i < step; ++i) {
        const ScriptItem& item = sc.script[i];
        if (item.expect) continue;  // an expected failure leaves no trace
        Applied out = apply(state, item.spec, log,
                            item.time != 0 ? std::optional<Timestamp>(item.time) : std::nullopt);
        state = std::move(out.state);
        log = std::move(out.log);
    }
    return {std::move(state), std::move(log)};
}

int require_clean(const stratos_scenario* sc) {
    if (!sc) return fail_arg("null scenario");
    if (has_errors(sc->parsed.diagnostics)) {
        g_last_error = "scenario has diagnostics";
        return STRATOS_E_PARSE;
    }
    return STRATOS_OK;
}

}  // namespace

extern "C" {

const char* stratos_version(void) { return "0.1.0"; }

const char* stratos_last_error(void) { return g_last_error.c_str(); }

void stratos_string_free(char* s) { std::free(s); }

int stratos_scenario_load(const char* path, stratos_scenario** out) {
    if (!path || !out) return fail_arg("null argument");
    *out = nullptr;
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        g_last_error = std::string("cannot open '") + path + "'";
        return STRATOS_E_IO;
    }
    std::ostringstream text;
    text << in.rdbuf();
    if (in.bad()) {
        g_last_error = std::string("cannot read '") + path + "'";
        return STRATOS_E_IO;
    }
    return guarded([&] {
        auto* sc = new stratos_scenario{parse_scenario(text.str()), path};
        *out = sc;
        return STRATOS_OK;
    });
}

int stratos_scenario_from_text(const char* text, stratos_scenario** out) {
    if (!text || !out) return fail_arg("null argument");
    *out = nullptr;
    return guarded([&] {
        auto* sc = new stratos_scenario{parse_scenario(text), std::string()};
        *out = sc;
        return STRATOS_OK;
    });
}

void stratos_scenario_free(stratos_scenario* sc) { delete sc; }

int stratos_scenario_ok(const stratos_scenario* sc) {
    return sc && !has_errors(sc->parsed.diagnostics) ? 1 : 0;
}

int stratos_scenario_diagnostics_json(const stratos_scenario* sc, char** out) {
    if (!sc || !out) return fail_arg("null argument");
    return guarded([&] { return give_json(out, diagnostics_to_json(sc->parsed.diagnostics)); });
}

int stratos_scenario_print(const stratos_scenario* sc, char** out) {
    if (!sc || !out) return fail_arg("null argument");
    return guarded([&] { return give(out, print_scenario(sc->parsed.scenario)); });
}

int stratos_scenario_digest(const stratos_scenario* sc, char** out) {
    if (!sc || !out) return fail_arg("null argument");
    return guarded([&] { return give(out, scenario_digest(sc->parsed.scenario)); });
}

int stratos_scenario_world_json(const stratos_scenario* sc, char** out) {
    if (!sc || !out) return fail_arg("null argument");
    return guarded([&] { return give_json(out, state_to_json(sc->parsed.scenario.world)); });
}

int stratos_run_new(const stratos_scenario* sc, int keep_going, int trace, stratos_run** out) {
    if (!out) return fail_arg("null argument");
    *out = nullptr;
    int rc = require_clean(sc);
    if (rc != STRATOS_OK) return rc;
    return guarded([&] {
        RunOptions opts;
        opts.keep_going = keep_going != 0;
        opts.trace = trace != 0;
        auto* r = new stratos_run{sc->parsed.scenario, {}};
        r->report = run_scenario(r->scenario, opts);
        r->report.path = sc->path;
        *out = r;
        return STRATOS_OK;
    });
}

void stratos_run_free(stratos_run* r) { delete r; }

int stratos_run_ok(const stratos_run* r) { return r && r->report.ok ? 1 : 0; }

int stratos_run_report_json(const stratos_run* r, char** out) {
    if (!r || !out) return fail_arg("null argument");
    return guarded([&] { return give_json(out, report_to_json(r->report)); });
}

int stratos_run_history_json(const stratos_run* r, char** out) {
    if (!r || !out) return fail_arg("null argument");
    return guarded([&] { return give_json(out, log_to_json(r->report.log)); });
}

int stratos_run_final_state_json(const stratos_run* r, char** out) {
    if (!r || !out) return fail_arg("null argument");
    return guarded([&] { return give_json(out, state_to_json(r->report.final_state)); });
}

int stratos_run_final_digest(const stratos_run* r, char** out) {
    if (!r || !out) return fail_arg("null argument");
    return guarded([&] { return give(out, r->report.final_digest); });
}

int stratos_run_query(const stratos_run* r, const char* const* words, size_t count, char** out) {
    if (!r || !words || !out) return fail_arg("null argument");
    return guarded([&] {
        std::vector<std::string> q;
        for (size_t i = 0; i < count; ++i) {
            if (!words[i]) return fail_arg("null query word");
            q.emplace_back(words[i]);
        }
        return give(out, evaluate_query(r->scenario, r->report.final_state, r->report.log, q));
    });
}

int stratos_classify(const stratos_scenario* pre, const stratos_scenario* post, const char* unit,
                     char** out) {
    if (!unit || !out) return fail_arg("null argument");
    int rc = require_clean(pre);
    if (rc != STRATOS_OK) return rc;
    rc = require_clean(post);
    if (rc != STRATOS_OK) return rc;
    return guarded([&] {
        auto kinds = classify(pre->parsed.scenario.world, post->parsed.scenario.world,
                              UnitId(unit));
        Json arr = Json::array();
        for (auto k : kinds) arr.push_back(classified_kind_name(k));
        return give_json(out, arr);
    });
}

int stratos_score(const char* input_json, char** out) {
    if (!input_json || !out) return fail_arg("null argument");
    return guarded([&] {
        Json j = Json::parse(input_json, nullptr, false);
        if (j.is_discarded()) return fail_arg("input is not JSON");
        DoutsScore s = score(douts_input_from_json(j));
        return give_json(out, douts_score_to_json(s));
    });
}

int stratos_plan(const stratos_scenario* sc, size_t step, char** out) {
    if (!out) return fail_arg("null argument");
    int rc = require_clean(sc);
    if (rc != STRATOS_OK) return rc;
    const Scenario& s = sc->parsed.scenario;
    if (step >= s.script.size()) return fail_arg("step index out of range");
    return guarded([&] {
        auto [state, log] = replay_until(s, step);
        TransitionPlan p = plan(state, s.script[step].spec, log);
        return give_json(out, plan_to_json(p));
    });
}

int stratos_verify(const stratos_scenario* sc, size_t step, const char* plan_json, char** out) {
    if (!plan_json || !out) return fail_arg("null argument");
    int rc = require_clean(sc);
    if (rc != STRATOS_OK) return rc;
    const Scenario& s = sc->parsed.scenario;
    if (step >= s.script.size()) return fail_arg("step index out of range");
    return guarded([&] {
        Json j = Json::parse(plan_json, nullptr, false);
        if (j.is_discarded()) return fail_arg("plan is not JSON");
        TransitionPlan p = plan_from_json(j);
        auto [state, log] = replay_until(s, step);
        Diagnostics diags;
        bool ok = verify_plan(state, p, s.script[step].spec, log, &diags);
        Json result;
        result["ok"] = ok;
        result["diagnostics"] = diagnostics_to_json(diags);
        return give_json(out, result);
    });
}

int stratos_match(const stratos_scenario* sc, const char* lot, char** out) {
    if (!lot || !out) return fail_arg("null argument");
    int rc = require_clean(sc);
    if (rc != STRATOS_OK) return rc;
    return guarded([&] {
        const Scenario& s = sc->parsed.scenario;
        auto it = s.lots.find(lot);
        if (it == s.lots.end()) throw_unknown("lot", lot);
        std::vector<Bid> bids;
        for (const auto& [id, b] : s.bids) {
            if (b.lot == lot) bids.push_back(b);
        }
        auto ranked = select_fit(it->second.derived, bids, s.world);
        Json arr = Json::array();
        for (const auto& rb : ranked) {
            Json jb;
            jb["bid"] = rb.bid.id;
            jb["valid"] = rb.valid;
            jb["diagnostics"] = diagnostics_to_json(validate_bid(it->second.derived, rb.bid,
                                                                 s.world));
            arr.push_back(jb);
        }
        Json result;
        result["lot"] = lot;
        result["ranking_rule"] = kRankingRule;
        result["bids"] = arr;
        return give_json(out, result);
    });
}

}  // extern "C"
