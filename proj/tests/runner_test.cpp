#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>
#include <vector>

#include "core/digest.hpp"
#include "core/error.hpp"
#include "dsl/dsl.hpp"
#include "runner/runner.hpp"

using namespace stratos;

namespace {

const char* kBase = R"(
unit U { name="Restaurant" }
unit V { name="CleanCo" }
unit W { name="Axis" }
source_type Cleaning singleton=false
source S1 : Cleaning owned_by U descriptor="in-house crew"
source S2 : Cleaning owned_by V descriptor="mobile crew"
theme T by U name="office cleaning"
theme TV by V name="crew operations"
use U S1 for T
use V S2 for TV
douts D1 { service_contracted=true sources_transferred=true initial_production=true
           lift process_stable lift more_economic_than_split }
douts D2 { service_contracted=true sources_transferred=true initial_production=true
           lift process_stable lift more_economic_than_split lift incorporation_plausible
           lift risk_enabled_by_contract lift positive_asset_value_shared }
)";

Scenario parsed(const std::string& text) {
    ParseResult r = parse_scenario(text);
    REQUIRE(r.ok);
    return r.scenario;
}

std::string script_tail() {
    return R"(
assert owner S1 == U
assert selfsourcing U S1 == true
apply outsource actor=U to=[V] sources=[S1] time=7 commit=[S1]
    service={ id=C1 theme=T period=(0,60) notice=12 termination="hand back the keys" }
assert owner S1 == V
assert committed U S1 == true
assert non_selfsourcing U S1 == true
assert classified outsource == true
assert commitment_class U == preserving
assert provenance U S1 == outsourced_to
assert provenance_units U S1 == "V"
assert has_contract C1 == true
assert douts D1 == 82/100
assert douts D2 == 1
apply backsource actor=U to=[V] sources=[S1] time=9
assert owner S1 == U
assert committed U S1 == false
assert has_contract C1 == false
assert selfsourcing U S1 == true
assert history_length == 2
assert provenance U S1 == backsourced
)";
}

}  // namespace

TEST_CASE("a scripted outsource and backsource runs clean") {
    Scenario sc = parsed(std::string(kBase) + script_tail());
    RunOptions opts;
    opts.trace = true;
    RunReport r = run_scenario(sc, opts);

    CHECK(r.ok);
    CHECK(r.steps.size() == 2);
    CHECK(r.steps_executed == 2);
    for (const auto& s : r.steps) {
        CHECK(s.ok);
        CHECK(s.executed);
        CHECK(s.detail.empty());
    }
    CHECK(r.assertions.size() == sc.assertions.size());
    CHECK(r.assertions_failed == 0);
    CHECK(r.assertions_passed == sc.assertions.size());
    CHECK(r.final_digest == state_digest(r.final_state));
    CHECK(r.final_state.timestamp == 9);

    REQUIRE(r.log.size() == 2);
    CHECK(r.log[0].pre_digest == state_digest(sc.world));
    CHECK(r.log[0].post_digest == r.steps[0].post_digest);
    CHECK(r.log[1].pre_digest == r.log[0].post_digest);
    CHECK(r.log[1].post_digest == r.final_digest);

    REQUIRE(r.trace.size() == 3);
    CHECK(r.trace[0] == state_digest(sc.world));
    CHECK(r.trace[1] == r.steps[0].post_digest);
    CHECK(r.trace[2] == r.steps[1].post_digest);
}

TEST_CASE("assertions read the state at their position") {
    Scenario sc = parsed(std::string(kBase) + script_tail());
    RunReport r = run_scenario(sc);
    // same query, different answers before and after the backsource
    std::vector<std::string> owners;
    for (const auto& a : r.assertions) {
        if (a.item.query.size() == 2 && a.item.query[0] == "owner") owners.push_back(a.actual);
    }
    REQUIRE(owners.size() == 3);
    CHECK(owners[0] == "U");
    CHECK(owners[1] == "V");
    CHECK(owners[2] == "U");
}

TEST_CASE("an expected precondition failure leaves the state unchanged") {
    Scenario sc = parsed(std::string(kBase) + R"(
apply backsource actor=V to=[W] sources=[S2] expect=NOT_OUTSOURCED
apply outsource actor=U to=[V] sources=[S1]
    service={ id=C1 theme=T period=(0,60) notice=12 termination="hand back the keys" }
assert owner S1 == V
)");
    RunReport r = run_scenario(sc);
    CHECK(r.ok);
    REQUIRE(r.steps.size() == 2);
    CHECK(r.steps[0].ok);
    CHECK_FALSE(r.steps[0].executed);
    CHECK(r.steps[0].detail == "NOT_OUTSOURCED");
    CHECK(r.steps[0].post_digest == state_digest(sc.world));
    CHECK(r.steps[1].executed);
    CHECK(r.steps_executed == 1);
    // the skipped step adds no event, so the chain starts at the second step
    REQUIRE(r.log.size() == 1);
    CHECK(r.log[0].pre_digest == state_digest(sc.world));
}

TEST_CASE("an unmet expectation fails the step") {
    Scenario sc = parsed(std::string(kBase) + R"(
apply outsource actor=U to=[V] sources=[S1] expect=SERVICE_REQUIRED
    service={ id=C1 theme=T period=(0,60) notice=12 termination="hand back the keys" }
)");
    RunReport r = run_scenario(sc);
    CHECK_FALSE(r.ok);
    REQUIRE(r.steps.size() == 1);
    CHECK_FALSE(r.steps[0].ok);
    CHECK_FALSE(r.steps[0].executed);
    CHECK(r.steps[0].detail.find("expected failure SERVICE_REQUIRED") != std::string::npos);
}

TEST_CASE("a wrong failure code fails the step") {
    Scenario sc = parsed(std::string(kBase) + R"(
apply backsource actor=V to=[W] sources=[S2] expect=SUBJECT_REQUIRED
)");
    RunReport r = run_scenario(sc);
    CHECK_FALSE(r.ok);
    REQUIRE(r.steps.size() == 1);
    CHECK_FALSE(r.steps[0].ok);
    CHECK(r.steps[0].detail == "NOT_OUTSOURCED");
}

TEST_CASE("the first broken step ends a fail fast run") {
    std::string text = std::string(kBase) + R"(
apply backsource actor=V to=[W] sources=[S2]
apply outsource actor=U to=[V] sources=[S1]
    service={ id=C1 theme=T period=(0,60) notice=12 termination="hand back the keys" }
assert owner S1 == U
)";
    Scenario sc = parsed(text);

    RunReport fast = run_scenario(sc);
    CHECK_FALSE(fast.ok);
    REQUIRE(fast.steps.size() == 1);
    CHECK_FALSE(fast.steps[0].ok);
    CHECK(fast.steps[0].detail == "NOT_OUTSOURCED");
    // the trailing assertion is judged against the last state reached
    REQUIRE(fast.assertions.size() == 1);
    CHECK(fast.assertions[0].passed);
    CHECK(fast.assertions[0].actual == "U");

    RunOptions opts;
    opts.keep_going = true;
    RunReport slow = run_scenario(sc, opts);
    CHECK_FALSE(slow.ok);
    REQUIRE(slow.steps.size() == 2);
    CHECK(slow.steps[1].executed);
    REQUIRE(slow.assertions.size() == 1);
    CHECK_FALSE(slow.assertions[0].passed);
    CHECK(slow.assertions[0].actual == "V");
}

TEST_CASE("a failing assertion fails the run") {
    Scenario sc = parsed(std::string(kBase) + R"(
assert owner S1 == V
)");
    RunReport r = run_scenario(sc);
    CHECK_FALSE(r.ok);
    CHECK(r.assertions_failed == 1);
    REQUIRE(r.assertions.size() == 1);
    CHECK_FALSE(r.assertions[0].passed);
    CHECK(r.assertions[0].actual == "U");
    CHECK(r.assertions[0].message == "expected V, got U");
}

TEST_CASE("rational expectations are normalized before comparison") {
    Scenario sc = parsed(std::string(kBase) + R"(
assert douts D1 == 82/100
assert douts D2 == 1/1
assert douts D1 == 41/50
)");
    RunReport r = run_scenario(sc);
    CHECK(r.ok);
    CHECK(r.assertions_passed == 3);
    CHECK(r.assertions[0].actual == "41/50");
    CHECK(r.assertions[1].actual == "1");
}

TEST_CASE("plain string expectations stay strict") {
    Scenario sc = parsed(std::string(kBase) + R"(
assert type_status U Cleaning == selfsourcing_type
)");
    RunReport r = run_scenario(sc);
    CHECK(r.ok);
    REQUIRE(r.assertions.size() == 1);
    CHECK(r.assertions[0].actual == "selfsourcing_type");
}

TEST_CASE("queries cover the relation vocabulary") {
    Scenario sc = parsed(std::string(kBase) + R"(
contract C0 provider=V consumer=U theme=T period=(0,40) notice=5
    termination="wind down"
)");
    const WorldState& w = sc.world;
    HistoryLog log;
    auto q = [&](std::vector<std::string> parts) { return evaluate_query(sc, w, log, parts); };

    CHECK(q({"uses", "U", "S1"}) == "true");
    CHECK(q({"uses", "U", "S2"}) == "false");
    CHECK(q({"has_use", "U", "S1", "T"}) == "true");
    CHECK(q({"owner", "S2"}) == "V");
    CHECK(q({"committed", "U", "S1"}) == "false");
    CHECK(q({"type_status", "U", "Cleaning"}) == "selfsourcing_type");
    CHECK(q({"selfsourcing_type", "U", "Cleaning"}) == "true");
    CHECK(q({"partial_selfsourcing_type", "U", "Cleaning"}) == "true");
    CHECK(q({"non_selfsourcing_type", "U", "Cleaning"}) == "false");
    CHECK(q({"partial_non_selfsourcing_type", "U", "Cleaning"}) == "false");
    CHECK(q({"used_count", "U", "Cleaning"}) == "1");
    CHECK(q({"closure_size", "S1"}) == "1");
    CHECK(q({"has_unit", "W"}) == "true");
    CHECK(q({"has_unit", "Z"}) == "false");
    CHECK(q({"has_source", "S1"}) == "true");
    CHECK(q({"has_contract", "C0"}) == "true");
    CHECK(q({"douts", "D1"}) == "41/50");
    CHECK(q({"digest"}) == state_digest(w));
    CHECK(q({"history_length"}) == "0");
    CHECK(q({"provenance", "U", "S1"}) == "developed_inside_never_outsourced");
    CHECK(q({"service_characteristic", "C0"}) != "");

    CHECK_THROWS_WITH_AS(q({"frobnicate", "U"}), doctest::Contains("unknown query head"),
                         Error);
    CHECK_THROWS_AS(q({"owner"}), Error);
    CHECK_THROWS_AS(q({"douts", "NOPE"}), Error);
    CHECK_THROWS_AS(q({"classified", "outsource"}), Error);
    CHECK_THROWS_AS(q({"commitment_class", "U"}), Error);
    try {
        q({"frobnicate"});
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.detail() == "UNKNOWN_QUERY");
    }
}

TEST_CASE("invalid worlds do not run") {
    Scenario sc = parsed(std::string(kBase) + R"(
apply outsource actor=U to=[V] sources=[S1]
    service={ id=C1 theme=T period=(0,60) notice=12 termination="hand back the keys" }
)");
    // a commitment to a source the unit itself owns breaks validation
    SourceCommitment cm;
    cm.id = CommitmentId("cm.U.S1");
    cm.committed_unit = UnitId("U");
    cm.source = SourceId("S1");
    cm.origin = "declared";
    sc.world.commitments.emplace(cm.id, cm);

    RunReport r = run_scenario(sc);
    CHECK_FALSE(r.ok);
    CHECK(has_errors(r.diagnostics));
    CHECK(r.steps.empty());
    CHECK(r.steps_executed == 0);
}

TEST_CASE("the report serializes the full run") {
    Scenario sc = parsed(std::string(kBase) + script_tail());
    RunOptions opts;
    opts.trace = true;
    RunReport r = run_scenario(sc, opts);
    r.path = "demo.srcm";
    Json j = report_to_json(r);

    CHECK(j["path"] == "demo.srcm");
    CHECK(j["ok"] == true);
    CHECK(j["steps_executed"] == 2);
    CHECK(j["assertions_failed"] == 0);
    CHECK(j["final_digest"] == r.final_digest);
    REQUIRE(j["steps"].size() == 2);
    CHECK(j["steps"][0]["kind"] == "outsource");
    CHECK(j["steps"][0]["ok"] == true);
    CHECK(j["steps"][1]["kind"] == "backsource");
    REQUIRE(j["assertions"].size() == r.assertions.size());
    CHECK(j["assertions"][0]["query"] == "owner S1");
    CHECK(j["assertions"][0]["expected"] == "U");
    CHECK(j["assertions"][0]["actual"] == "U");
    CHECK(j["assertions"][0]["passed"] == true);
    REQUIRE(j["trace"].size() == 3);
    CHECK_FALSE(j.contains("diagnostics"));

    Scenario bad = parsed(std::string(kBase) + "\nassert owner S1 == V\n");
    Json jb = report_to_json(run_scenario(bad));
    CHECK(jb["ok"] == false);
    CHECK(jb["assertions"][0]["passed"] == false);
    CHECK(std::string(jb["assertions"][0]["message"]).find("expected V") != std::string::npos);
    CHECK_FALSE(jb.contains("trace"));
}

TEST_CASE("a backsource after an outsourcing of type is undefined") {
    Scenario sc = parsed(std::string(kBase) + R"(
apply outsource_of_type actor=U to=[V] type=Cleaning
    service={ id=C1 theme=T period=(0,60) notice=12 termination="hand back the keys" }
apply backsource actor=U to=[V] sources=[S1] expect=BACKSOURCE_AFTER_TYPE
assert owner S1 == V
)");
    RunReport r = run_scenario(sc);
    CHECK(r.ok);
    REQUIRE(r.steps.size() == 2);
    CHECK(r.steps[1].ok);
    CHECK_FALSE(r.steps[1].executed);
    CHECK(r.steps[1].detail == "BACKSOURCE_AFTER_TYPE");
}
