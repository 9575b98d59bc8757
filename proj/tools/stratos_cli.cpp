// Command line frontend. Everything goes through the C API; no engine
// internals are linked here.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <stratos/stratos.h>

#if !defined(_WIN32)
#include <unistd.h>
#endif

using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kDomain = 1;
constexpr int kEnv = 2;

std::string take(char* s) {
    std::string out = s ? s : "";
    stratos_string_free(s);
    return out;
}

struct Scenario {
    stratos_scenario* p = nullptr;
    ~Scenario() { stratos_scenario_free(p); }
};

struct Run {
    stratos_run* p = nullptr;
    ~Run() { stratos_run_free(p); }
};

bool color_enabled() {
    const char* v = std::getenv("STRATOS_COLOR");
    if (v && std::string(v) == "0") return false;
#if !defined(_WIN32)
    return isatty(fileno(stderr)) != 0;
#else
    return false;
#endif
}

const char* severity_color(const std::string& severity) {
    if (severity == "error") return "\033[31m";
    if (severity == "warning") return "\033[33m";
    return "\033[36m";
}

void print_diagnostics(const std::string& diagnostics_json) {
    bool color = color_enabled();
    json diags = json::parse(diagnostics_json, nullptr, false);
    if (diags.is_discarded()) return;
    for (const auto& d : diags) {
        std::string severity = d.value("severity", "error");
        std::ostringstream line;
        line << severity << " " << d.value("code", "");
        if (d.contains("line")) {
            line << " at " << d["line"].get<long long>() << ":"
                 << d["column"].get<long long>();
        }
        if (d.contains("entities") && !d["entities"].empty()) {
            line << " [";
            for (std::size_t i = 0; i < d["entities"].size(); ++i) {
                if (i) line << ", ";
                line << d["entities"][i].get<std::string>();
            }
            line << "]";
        }
        std::string message = d.value("message", "");
        if (!message.empty()) line << ": " << message;
        if (color) {
            std::cerr << severity_color(severity) << line.str() << "\033[0m\n";
        } else {
            std::cerr << line.str() << "\n";
        }
        if (d.contains("excerpt")) {
            std::cerr << "    " << d["excerpt"].get<std::string>() << "\n";
        }
    }
}

// Loads a scenario; on failure prints the reason and fills `exit_code`.
bool load_scenario(const std::string& path, Scenario& sc, int& exit_code, bool quiet) {
    int rc = stratos_scenario_load(path.c_str(), &sc.p);
    if (rc == STRATOS_E_IO) {
        std::cerr << "error: " << stratos_last_error() << "\n";
        exit_code = kEnv;
        return false;
    }
    if (rc != STRATOS_OK) {
        std::cerr << "error: " << stratos_last_error() << "\n";
        exit_code = kDomain;
        return false;
    }
    if (!stratos_scenario_ok(sc.p)) {
        if (!quiet) {
            char* out = nullptr;
            if (stratos_scenario_diagnostics_json(sc.p, &out) == STRATOS_OK) {
                print_diagnostics(take(out));
            }
        }
        exit_code = kDomain;
        return false;
    }
    return true;
}

int cmd_check(const std::vector<std::string>& paths, bool as_json, bool quiet) {
    int worst = kOk;
    json files = json::array();
    for (const auto& path : paths) {
        Scenario sc;
        int rc = stratos_scenario_load(path.c_str(), &sc.p);
        if (rc == STRATOS_E_IO) {
            std::cerr << "error: " << stratos_last_error() << "\n";
            worst = kEnv;
            continue;
        }
        bool ok = rc == STRATOS_OK && stratos_scenario_ok(sc.p) == 1;
        std::string diagnostics = "[]\n";
        if (sc.p) {
            char* out = nullptr;
            if (stratos_scenario_diagnostics_json(sc.p, &out) == STRATOS_OK) {
                diagnostics = take(out);
            }
        }
        if (as_json) {
            json f;
            f["path"] = path;
            f["ok"] = ok;
            f["diagnostics"] = json::parse(diagnostics);
            files.push_back(f);
        } else if (!ok) {
            if (paths.size() > 1) std::cerr << path << ":\n";
            print_diagnostics(diagnostics);
        } else if (!quiet) {
            std::cout << path << ": ok\n";
        }
        if (!ok && worst == kOk) worst = kDomain;
    }
    if (as_json) std::cout << files.dump() << "\n";
    return worst;
}

int cmd_run(const std::string& path, bool as_json, bool trace, bool keep_going, bool quiet) {
    Scenario sc;
    int exit_code = kOk;
    if (!load_scenario(path, sc, exit_code, quiet)) return exit_code;
    Run run;
    if (stratos_run_new(sc.p, keep_going ? 1 : 0, trace ? 1 : 0, &run.p) != STRATOS_OK) {
        std::cerr << "error: " << stratos_last_error() << "\n";
        return kDomain;
    }
    char* out = nullptr;
    if (stratos_run_report_json(run.p, &out) != STRATOS_OK) {
        std::cerr << "error: " << stratos_last_error() << "\n";
        return kDomain;
    }
    std::string report_text = take(out);
    if (as_json) {
        std::cout << report_text;
        return stratos_run_ok(run.p) ? kOk : kDomain;
    }
    if (!quiet) {
        json report = json::parse(report_text);
        std::size_t kind_width = 0;
        for (const auto& s : report["steps"]) {
            kind_width = std::max(kind_width, s["kind"].get<std::string>().size());
        }
        for (const auto& s : report["steps"]) {
            std::string kind = s["kind"].get<std::string>();
            std::cout << "step " << s["index"].get<long long>() << "  " << kind
                      << std::string(kind_width - kind.size(), ' ') << "  ";
            if (s["ok"].get<bool>()) {
                std::cout << (s["executed"].get<bool>()
                                  ? "ok"
                                  : "ok (failed as expected: " +
                                        s.value("detail", std::string()) + ")");
            } else {
                std::cout << "failed: " << s.value("detail", std::string());
            }
            std::cout << "\n";
        }
        for (const auto& a : report["assertions"]) {
            std::cout << "assert " << a["query"].get<std::string>() << " == "
                      << a["expected"].get<std::string>() << "  ";
            if (a["passed"].get<bool>()) {
                std::cout << "ok";
            } else if (a.contains("message")) {
                std::cout << "failed: " << a["message"].get<std::string>();
            } else {
                std::cout << "failed";
            }
            std::cout << "\n";
        }
        if (trace && report.contains("trace")) {
            std::size_t i = 0;
            for (const auto& d : report["trace"]) {
                std::cout << "digest " << i++ << "  " << d.get<std::string>() << "\n";
            }
        }
        std::cout << report["steps_executed"].get<long long>() << "/"
                  << report["steps"].size() << " steps, "
                  << report["assertions_passed"].get<long long>() << " passed, "
                  << report["assertions_failed"].get<long long>() << " failed, digest "
                  << report["final_digest"].get<std::string>() << "\n";
    }
    return stratos_run_ok(run.p) ? kOk : kDomain;
}

int cmd_query(const std::string& path, const std::vector<std::string>& words, bool as_json) {
    Scenario sc;
    int exit_code = kOk;
    if (!load_scenario(path, sc, exit_code, false)) return exit_code;
    Run run;
    if (stratos_run_new(sc.p, 0, 0, &run.p) != STRATOS_OK) {
        std::cerr << "error: " << stratos_last_error() << "\n";
        return kDomain;
    }
    std::vector<const char*> argv;
    argv.reserve(words.size());
    for (const auto& w : words) argv.push_back(w.c_str());
    char* out = nullptr;
    if (stratos_run_query(run.p, argv.data(), argv.size(), &out) != STRATOS_OK) {
        std::cerr << "error: " << stratos_last_error() << "\n";
        return kDomain;
    }
    std::string value = take(out);
    if (as_json) {
        json j;
        std::string joined;
        for (const auto& w : words) {
            if (!joined.empty()) joined += ' ';
            joined += w;
        }
        j["query"] = joined;
        j["value"] = value;
        std::cout << j.dump() << "\n";
    } else {
        std::cout << value << "\n";
    }
    return kOk;
}

int cmd_classify(const std::string& pre_path, const std::string& post_path,
                 const std::string& unit, bool as_json) {
    Scenario pre;
    Scenario post;
    int exit_code = kOk;
    if (!load_scenario(pre_path, pre, exit_code, false)) return exit_code;
    if (!load_scenario(post_path, post, exit_code, false)) return exit_code;
    char* out = nullptr;
    if (stratos_classify(pre.p, post.p, unit.c_str(), &out) != STRATOS_OK) {
        std::cerr << "error: " << stratos_last_error() << "\n";
        return kDomain;
    }
    std::string kinds_text = take(out);
    if (as_json) {
        std::cout << kinds_text;
    } else {
        for (const auto& k : json::parse(kinds_text)) {
            std::cout << k.get<std::string>() << "\n";
        }
    }
    return kOk;
}

int cmd_score(const std::string& input_path, bool as_json) {
    std::ifstream in(input_path, std::ios::binary);
    if (!in) {
        std::cerr << "error: cannot open '" << input_path << "'\n";
        return kEnv;
    }
    std::ostringstream text;
    text << in.rdbuf();
    char* out = nullptr;
    if (stratos_score(text.str().c_str(), &out) != STRATOS_OK) {
        std::cerr << "error: " << stratos_last_error() << "\n";
        return kDomain;
    }
    std::string score_text = take(out);
    if (as_json) {
        std::cout << score_text;
    } else {
        json s = json::parse(score_text);
        std::cout << "value   " << s["value"].get<std::string>() << "\n";
        std::cout << "approx  " << s["value_approx"].dump() << "\n";
        std::cout << "trace   ";
        for (std::size_t i = 0; i < s["rule_trace"].size(); ++i) {
            if (i) std::cout << ", ";
            std::cout << s["rule_trace"][i].get<std::string>();
        }
        std::cout << "\n";
    }
    return kOk;
}

void print_plan_steps(const json& plan) {
    for (std::size_t i = 0; i < plan["steps"].size(); ++i) {
        const json& s = plan["steps"][i];
        std::cout << i << "  lane " << s.value("lane", 0ll) << "  "
                  << s.value("kind", std::string());
        for (const auto& [key, value] : s.items()) {
            if (key == "kind" || key == "lane") continue;
            std::cout << "  " << key << "=";
            if (value.is_string()) {
                std::cout << value.get<std::string>();
            } else if (value.is_object() && value.contains("id")) {
                std::cout << value["id"].get<std::string>();
            } else {
                std::cout << value.dump();
            }
        }
        std::cout << "\n";
    }
}

int cmd_plan(const std::string& path, std::size_t step, bool as_json,
             const std::string& out_path) {
    Scenario sc;
    int exit_code = kOk;
    if (!load_scenario(path, sc, exit_code, false)) return exit_code;
    char* out = nullptr;
    if (stratos_plan(sc.p, step, &out) != STRATOS_OK) {
        std::cerr << "error: " << stratos_last_error() << "\n";
        return kDomain;
    }
    std::string plan_text = take(out);
    if (!out_path.empty()) {
        std::ofstream f(out_path, std::ios::binary);
        f << plan_text;
        if (!f) {
            std::cerr << "error: cannot write '" << out_path << "'\n";
            return kEnv;
        }
    }
    if (as_json) {
        std::cout << plan_text;
    } else {
        print_plan_steps(json::parse(plan_text));
    }
    return kOk;
}

int cmd_verify(const std::string& path, const std::string& plan_path, std::size_t step,
               bool as_json) {
    Scenario sc;
    int exit_code = kOk;
    if (!load_scenario(path, sc, exit_code, false)) return exit_code;
    std::ifstream in(plan_path, std::ios::binary);
    if (!in) {
        std::cerr << "error: cannot open '" << plan_path << "'\n";
        return kEnv;
    }
    std::ostringstream text;
    text << in.rdbuf();
    char* out = nullptr;
    if (stratos_verify(sc.p, step, text.str().c_str(), &out) != STRATOS_OK) {
        std::cerr << "error: " << stratos_last_error() << "\n";
        return kDomain;
    }
    std::string verdict_text = take(out);
    json verdict = json::parse(verdict_text);
    bool ok = verdict["ok"].get<bool>();
    if (as_json) {
        std::cout << verdict_text;
    } else if (ok) {
        std::cout << "plan implements step " << step << "\n";
    } else {
        std::cout << "plan does not implement step " << step << "\n";
        print_diagnostics(verdict["diagnostics"].dump());
    }
    return ok ? kOk : kDomain;
}

int cmd_match(const std::string& path, const std::string& lot, bool as_json) {
    Scenario sc;
    int exit_code = kOk;
    if (!load_scenario(path, sc, exit_code, false)) return exit_code;
    char* out = nullptr;
    if (stratos_match(sc.p, lot.c_str(), &out) != STRATOS_OK) {
        std::cerr << "error: " << stratos_last_error() << "\n";
        return kDomain;
    }
    std::string match_text = take(out);
    if (as_json) {
        std::cout << match_text;
    } else {
        json m = json::parse(match_text);
        std::cout << "lot " << m["lot"].get<std::string>() << " ("
                  << m["ranking_rule"].get<std::string>() << ")\n";
        std::size_t rank = 1;
        for (const auto& b : m["bids"]) {
            std::cout << rank++ << "  " << b["bid"].get<std::string>() << "  ";
            if (b["valid"].get<bool>()) {
                std::cout << "fit";
            } else {
                std::cout << "unfit";
                if (!b["diagnostics"].empty()) {
                    std::cout << ": " << b["diagnostics"][0].value("code", "");
                }
            }
            std::cout << "\n";
        }
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stratified sourcing engine"};
    app.require_subcommand(1);

    std::vector<std::string> check_paths;
    bool check_json = false, check_quiet = false;
    auto* check = app.add_subcommand("check", "parse and validate scenarios");
    check->add_option("paths", check_paths, "scenario files")->required()->expected(-1);
    check->add_flag("--json", check_json, "machine readable output");
    check->add_flag("--quiet", check_quiet, "no output for clean files");

    std::string run_path;
    bool run_json = false, run_trace = false, run_keep = false, run_quiet = false;
    auto* run = app.add_subcommand("run", "execute a scenario script with its assertions");
    run->add_option("path", run_path, "scenario file")->required();
    run->add_flag("--json", run_json, "emit the full report as JSON");
    run->add_flag("--trace", run_trace, "include every intermediate state digest");
    run->add_flag("--keep-going", run_keep, "continue past failed steps");
    run->add_flag("--quiet", run_quiet, "exit code only");

    std::string query_path;
    std::vector<std::string> query_words;
    bool query_json = false;
    auto* query = app.add_subcommand("query", "evaluate a predicate on the final state");
    query->add_option("path", query_path, "scenario file")->required();
    query->add_option("words", query_words, "query words")->required()->expected(-1);
    query->add_flag("--json", query_json, "machine readable output");

    std::string cls_pre, cls_post, cls_unit;
    bool cls_json = false;
    auto* classify = app.add_subcommand("classify", "candidate kinds for a world delta");
    classify->add_option("--pre", cls_pre, "scenario with the earlier world")->required();
    classify->add_option("--post", cls_post, "scenario with the later world")->required();
    classify->add_option("--unit", cls_unit, "unit in focus")->required();
    classify->add_flag("--json", cls_json, "machine readable output");

    std::string score_input;
    bool score_json = false;
    auto* score = app.add_subcommand("score", "score a sourcing transaction input");
    score->add_option("--input", score_input, "JSON input file")->required();
    score->add_flag("--json", score_json, "machine readable output");

    std::string plan_path, plan_out;
    std::size_t plan_step = 0;
    bool plan_json = false;
    auto* plan = app.add_subcommand("plan", "build the transition plan for a script step");
    plan->add_option("path", plan_path, "scenario file")->required();
    plan->add_option("--step", plan_step, "script step index");
    plan->add_option("-o,--out", plan_out, "write the plan to a file");
    plan->add_flag("--json", plan_json, "emit the plan as JSON");

    std::string verify_path, verify_plan;
    std::size_t verify_step = 0;
    bool verify_json = false;
    auto* verify = app.add_subcommand("verify", "check a plan against a script step");
    verify->add_option("path", verify_path, "scenario file")->required();
    verify->add_option("--plan", verify_plan, "plan JSON file")->required();
    verify->add_option("--step", verify_step, "script step index");
    verify->add_flag("--json", verify_json, "machine readable output");

    std::string match_path, match_lot;
    bool match_json = false;
    auto* match = app.add_subcommand("match", "validate and rank the bids on a lot");
    match->add_option("path", match_path, "scenario file")->required();
    match->add_option("lot", match_lot, "lot id")->required();
    match->add_flag("--json", match_json, "machine readable output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kEnv;
    }

    if (app.got_subcommand(check)) return cmd_check(check_paths, check_json, check_quiet);
    if (app.got_subcommand(run)) {
        return cmd_run(run_path, run_json, run_trace, run_keep, run_quiet);
    }
    if (app.got_subcommand(query)) return cmd_query(query_path, query_words, query_json);
    if (app.got_subcommand(classify)) {
        return cmd_classify(cls_pre, cls_post, cls_unit, cls_json);
    }
    if (app.got_subcommand(score)) return cmd_score(score_input, score_json);
    if (app.got_subcommand(plan)) return cmd_plan(plan_path, plan_step, plan_json, plan_out);
    if (app.got_subcommand(verify)) {
        return cmd_verify(verify_path, verify_plan, verify_step, verify_json);
    }
    if (app.got_subcommand(match)) return cmd_match(match_path, match_lot, match_json);
    return kEnv;
}
