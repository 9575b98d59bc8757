// Drives the installed binary as a subprocess; nothing here links the engine.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include <sys/wait.h>
#include <unistd.h>

using nlohmann::json;

namespace {

struct Proc {
    int code = -1;
    std::string out;
    std::string err;
};

std::string quoted(const std::string& s) { return "'" + s + "'"; }

Proc run_cli(const std::vector<std::string>& args) {
    static int counter = 0;
    std::string err_path = "/tmp/stratos_cli_err_" + std::to_string(getpid()) + "_" +
                           std::to_string(counter++);
    std::string cmd = "STRATOS_COLOR=0 " + quoted(STRATOS_CLI_PATH);
    for (const auto& a : args) cmd += " " + quoted(a);
    cmd += " 2>" + err_path;

    Proc p;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    std::size_t n = 0;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) p.out.append(buf, n);
    int status = pclose(pipe);
    p.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;

    std::ifstream e(err_path, std::ios::binary);
    std::ostringstream ss;
    ss << e.rdbuf();
    p.err = ss.str();
    std::remove(err_path.c_str());
    return p;
}

std::string corpus(const std::string& name) {
    return std::string(STRATOS_CORPUS_DIR) + "/" + name;
}

std::string temp_file(const std::string& name, const std::string& text) {
    std::string path = "/tmp/stratos_cli_" + std::to_string(getpid()) + "_" + name;
    std::ofstream f(path, std::ios::binary);
    f << text;
    REQUIRE(f.good());
    return path;
}

bool contains(const std::string& haystack, const std::string& needle) {
    return haystack.find(needle) != std::string::npos;
}

// One JSON document, canonically dumped, newline terminated.
void check_json_shape(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    REQUIRE(!j.is_discarded());
    CHECK(text == j.dump() + "\n");
}

const char kBadBacksource[] = R"(unit U { name="Works" }
unit V { name="Vendor" }
source_type Catering singleton=false
source S : Catering owned_by U descriptor="own crew"
theme T by U name="meals"
use U S for T

apply outsource_of_type actor=U to=[V] type=Catering
    service={ id=C theme=T period=(0,60) notice=12 termination="hand over" }
apply backsource actor=U to=[V] sources=[S]
assert owner S == U
)";

}  // namespace

TEST_CASE("check reports clean scenarios") {
    Proc p = run_cli({"check", corpus("consequence_1.srcm")});
    CHECK(p.code == 0);
    CHECK(contains(p.out, ": ok"));
    CHECK(p.err.empty());

    Proc quiet = run_cli({"check", corpus("consequence_1.srcm"), "--quiet"});
    CHECK(quiet.code == 0);
    CHECK(quiet.out.empty());
    CHECK(quiet.err.empty());
}

TEST_CASE("check rejects layering violations") {
    Proc p = run_cli({"check", corpus("stratification_neg_1.srcm")});
    CHECK(p.code == 1);
    CHECK(p.out.empty());
    CHECK(contains(p.err, "STRATIFICATION_VIOLATION"));
    CHECK(contains(p.err, "profit center"));

    Proc many = run_cli({"check", corpus("stratification_neg_1.srcm"),
                         corpus("stratification_neg_2.srcm"),
                         corpus("stratification_neg_3.srcm")});
    CHECK(many.code == 1);
    CHECK(contains(many.err, "stratification_neg_2"));
    CHECK(contains(many.err, "stratification_neg_3"));

    Proc mixed = run_cli({"check", corpus("consequence_1.srcm"),
                          corpus("stratification_neg_1.srcm")});
    CHECK(mixed.code == 1);
}

TEST_CASE("check --json carries the diagnostics") {
    Proc p = run_cli({"check", corpus("stratification_neg_2.srcm"), "--json"});
    CHECK(p.code == 1);
    json files = json::parse(p.out);
    REQUIRE(files.size() == 1);
    CHECK(files[0]["ok"] == false);
    REQUIRE(!files[0]["diagnostics"].empty());
    CHECK(files[0]["diagnostics"][0]["code"] == "STRATIFICATION_VIOLATION");

    Proc clean = run_cli({"check", corpus("demo_market.srcm"), "--json"});
    CHECK(clean.code == 0);
    json ok_files = json::parse(clean.out);
    CHECK(ok_files[0]["ok"] == true);
    CHECK(ok_files[0]["diagnostics"].empty());
}

TEST_CASE("missing files exit 2") {
    CHECK(run_cli({"check", corpus("absent.srcm")}).code == 2);
    Proc p = run_cli({"run", corpus("absent.srcm")});
    CHECK(p.code == 2);
    CHECK(contains(p.err, "absent.srcm"));
    CHECK(run_cli({"score", "--input", "/tmp/stratos_no_such_input.json"}).code == 2);
}

TEST_CASE("run --json emits the report verbatim") {
    Proc p = run_cli({"run", corpus("demo_restaurant.srcm"), "--json", "--trace"});
    CHECK(p.code == 0);
    check_json_shape(p.out);
    json report = json::parse(p.out);
    CHECK(report["ok"] == true);
    CHECK(report["steps_executed"] == 2);
    CHECK(report["assertions_failed"] == 0);
    CHECK(report["trace"].size() == 3);
    CHECK(report["final_digest"].get<std::string>().size() == 16);
}

TEST_CASE("run human output summarizes the script") {
    Proc p = run_cli({"run", corpus("consequence_6.srcm")});
    CHECK(p.code == 0);
    CHECK(contains(p.out, "step 0"));
    CHECK(contains(p.out, "backsource"));
    CHECK(contains(p.out, "2/2 steps"));
    CHECK(contains(p.out, "0 failed"));

    Proc quiet = run_cli({"run", corpus("consequence_6.srcm"), "--quiet"});
    CHECK(quiet.code == 0);
    CHECK(quiet.out.empty());
}

TEST_CASE("a failing step fails the run") {
    std::string path = temp_file("bad_back.srcm", kBadBacksource);
    Proc p = run_cli({"run", path});
    CHECK(p.code == 1);
    CHECK(contains(p.out, "failed: BACKSOURCE_AFTER_TYPE"));
    CHECK(contains(p.out, "expected U, got V"));

    Proc kept = run_cli({"run", path, "--keep-going", "--json"});
    CHECK(kept.code == 1);
    json report = json::parse(kept.out);
    CHECK(report["ok"] == false);
    CHECK(report["steps"][1]["ok"] == false);
    std::remove(path.c_str());
}

TEST_CASE("an expected failure keeps the run green") {
    Proc p = run_cli({"run", corpus("consequence_5.srcm")});
    CHECK(p.code == 0);
    CHECK(contains(p.out, "failed as expected: BACKSOURCE_AFTER_TYPE"));
}

TEST_CASE("run refuses scenarios with diagnostics") {
    Proc p = run_cli({"run", corpus("stratification_neg_3.srcm")});
    CHECK(p.code == 1);
    CHECK(contains(p.err, "STRATIFICATION_VIOLATION"));
}

TEST_CASE("query prints the evaluated value") {
    Proc p = run_cli({"query", corpus("demo_restaurant.srcm"), "owner", "S1"});
    CHECK(p.code == 0);
    CHECK(p.out == "U\n");

    Proc douts = run_cli({"query", corpus("demo_restaurant.srcm"), "douts", "DX"});
    CHECK(douts.out == "41/50\n");

    Proc as_json = run_cli({"query", corpus("demo_restaurant.srcm"), "douts", "DX", "--json"});
    CHECK(as_json.code == 0);
    check_json_shape(as_json.out);
    json j = json::parse(as_json.out);
    CHECK(j["query"] == "douts DX");
    CHECK(j["value"] == "41/50");

    Proc bad = run_cli({"query", corpus("demo_restaurant.srcm"), "frobnicate", "S1"});
    CHECK(bad.code == 1);
    CHECK(contains(bad.err, "frobnicate"));
}

TEST_CASE("classify lists one kind per line") {
    Proc p = run_cli({"classify", "--pre", corpus("consequence_3_pre.srcm"), "--post",
                      corpus("consequence_3_post.srcm"), "--unit", "U"});
    CHECK(p.code == 0);
    CHECK(p.out ==
          "outsource\n"
          "outsource_of_type\n"
          "drop_source_external_acquisition\n");

    Proc as_json = run_cli({"classify", "--pre", corpus("consequence_3_pre.srcm"), "--post",
                            corpus("consequence_3_post.srcm"), "--unit", "U", "--json"});
    check_json_shape(as_json.out);
    json kinds = json::parse(as_json.out);
    CHECK(kinds.size() == 3);

    Proc bad = run_cli({"classify", "--pre", corpus("consequence_3_pre.srcm"), "--post",
                        corpus("consequence_3_post.srcm"), "--unit", "NOPE"});
    CHECK(bad.code == 1);
}

TEST_CASE("score renders the value and the rule trace") {
    std::string input = temp_file("score.json",
                                  R"({"service_contracted":true,"sources_transferred":true,)"
                                  R"("initial_production_by_transferred_sources":true})");
    Proc p = run_cli({"score", "--input", input});
    CHECK(p.code == 0);
    CHECK(contains(p.out, "value   7/10"));
    CHECK(contains(p.out, "rule_4"));

    Proc as_json = run_cli({"score", "--input", input, "--json"});
    check_json_shape(as_json.out);
    json s = json::parse(as_json.out);
    CHECK(s["value"] == "7/10");
    CHECK(s["value_approx"] == doctest::Approx(0.7));

    std::string garbage = temp_file("score_bad.json", "not json at all");
    Proc bad = run_cli({"score", "--input", garbage});
    CHECK(bad.code == 1);
    CHECK(contains(bad.err, "not JSON"));
    std::remove(input.c_str());
    std::remove(garbage.c_str());
}

TEST_CASE("plan and verify round trip through a file") {
    std::string plan_path = "/tmp/stratos_cli_" + std::to_string(getpid()) + "_plan.json";
    Proc planned = run_cli({"plan", corpus("consequence_6.srcm"), "--step", "0", "-o",
                            plan_path});
    CHECK(planned.code == 0);
    CHECK(contains(planned.out, "transfer_ownership"));
    CHECK(contains(planned.out, "create_contract"));

    Proc as_json = run_cli({"plan", corpus("consequence_6.srcm"), "--step", "0", "--json"});
    check_json_shape(as_json.out);
    CHECK(!json::parse(as_json.out)["steps"].empty());

    Proc good = run_cli({"verify", corpus("consequence_6.srcm"), "--plan", plan_path,
                         "--step", "0"});
    CHECK(good.code == 0);
    CHECK(contains(good.out, "implements step 0"));

    Proc wrong = run_cli({"verify", corpus("consequence_6.srcm"), "--plan", plan_path,
                          "--step", "1"});
    CHECK(wrong.code == 1);
    CHECK(contains(wrong.out, "does not implement"));
    CHECK(contains(wrong.err, "PRE_MISMATCH"));

    Proc wrong_json = run_cli({"verify", corpus("consequence_6.srcm"), "--plan", plan_path,
                               "--step", "1", "--json"});
    CHECK(wrong_json.code == 1);
    check_json_shape(wrong_json.out);
    CHECK(json::parse(wrong_json.out)["ok"] == false);

    Proc out_of_range = run_cli({"plan", corpus("consequence_6.srcm"), "--step", "99"});
    CHECK(out_of_range.code == 1);
    CHECK(contains(out_of_range.err, "out of range"));
    std::remove(plan_path.c_str());
}

TEST_CASE("match ranks the bids on a lot") {
    Proc p = run_cli({"match", corpus("demo_market.srcm"), "L"});
    CHECK(p.code == 0);
    CHECK(contains(p.out, "lot L"));
    std::size_t b1 = p.out.find("B1");
    std::size_t b2 = p.out.find("B2");
    std::size_t b3 = p.out.find("B3");
    REQUIRE(b1 != std::string::npos);
    REQUIRE(b2 != std::string::npos);
    REQUIRE(b3 != std::string::npos);
    CHECK(b1 < b2);
    CHECK(b2 < b3);
    CHECK(contains(p.out, "unfit: TYPE_CONSTRAINT"));

    Proc as_json = run_cli({"match", corpus("demo_market.srcm"), "L", "--json"});
    check_json_shape(as_json.out);
    json m = json::parse(as_json.out);
    CHECK(m["ranking_rule"] == "validity_then_counterparty_count");
    CHECK(m["bids"].size() == 3);
    CHECK(m["bids"][0]["valid"] == true);
    CHECK(m["bids"][2]["valid"] == false);

    Proc bad = run_cli({"match", corpus("demo_market.srcm"), "NOPE"});
    CHECK(bad.code == 1);
    CHECK(contains(bad.err, "NOPE"));
}

TEST_CASE("usage errors exit 2 and help exits 0") {
    CHECK(run_cli({}).code == 2);
    CHECK(run_cli({"bogus"}).code == 2);
    CHECK(run_cli({"run"}).code == 2);
    CHECK(run_cli({"--help"}).code == 0);
}
