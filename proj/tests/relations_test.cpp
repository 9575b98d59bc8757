#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "core/error.hpp"
#include "gen.hpp"
#include "relations/relations.hpp"

using namespace stratos;

namespace {

WorldState base_state() {
    WorldState w;
    for (const char* u : {"U", "V"}) {
        w.units.emplace(UnitId(u), Unit{UnitId(u), u, {}, {}});
    }
    w.source_types.emplace(SourceTypeId("tau"), SourceType{SourceTypeId("tau"), false});
    for (const char* s : {"S1", "S2"}) {
        w.sources.emplace(SourceId(s),
                          Source{SourceId(s), SourceTypeId("tau"), UnitId("U"), "", {}, false});
    }
    w.themes.emplace(ThemeId("T"), Theme{ThemeId("T"), UnitId("U"), "theme", {}});
    return w;
}

// straight quantifier transcription, kept deliberately separate from the
// library implementation
bool oracle_uses(const WorldState& w, const UnitId& u, const SourceId& s) {
    for (const auto& ur : w.use_relations) {
        if (ur.user == u && ur.source == s && w.theme(ur.theme).maintainer == u) return true;
    }
    return false;
}

struct OracleTypeAnswer {
    bool self, partial_self, non, partial_non, using_any;
};

OracleTypeAnswer oracle_type(const WorldState& w, const UnitId& u, const SourceTypeId& tau) {
    OracleTypeAnswer a{true, false, true, false, false};
    for (const auto& [sid, src] : w.sources) {
        if (!(src.type == tau) || !oracle_uses(w, u, sid)) continue;
        a.using_any = true;
        if (src.owner == u) {
            a.partial_self = true;
            a.non = false;
        } else {
            a.partial_non = true;
            a.self = false;
        }
    }
    if (!a.using_any) a = {false, false, false, false, false};
    return a;
}

}  // namespace

TEST_CASE("use requires a theme maintained by the user") {
    auto w = base_state();
    CHECK(!uses(w, UnitId("U"), SourceId("S1")));
    w.add_use(UseRelation{UnitId("U"), SourceId("S1"), ThemeId("T")});
    CHECK(uses(w, UnitId("U"), SourceId("S1")));
    CHECK(!uses(w, UnitId("V"), SourceId("S1")));
    CHECK_THROWS_AS((void)uses(w, UnitId("nope"), SourceId("S1")), Error);
    CHECK_THROWS_AS((void)uses(w, UnitId("U"), SourceId("nope")), Error);
}

TEST_CASE("self and non-self sourcing split the users exactly") {
    // all four combinations of use x ownership
    for (bool used : {false, true}) {
        for (bool owned : {false, true}) {
            auto w = base_state();
            if (!owned) w.sources.at(SourceId("S1")).owner = UnitId("V");
            if (used) w.add_use(UseRelation{UnitId("U"), SourceId("S1"), ThemeId("T")});
            bool self = selfsourcing_for_source(w, UnitId("U"), SourceId("S1"));
            bool non = non_selfsourcing_for_source(w, UnitId("U"), SourceId("S1"));
            CHECK(self == (used && owned));
            CHECK(non == (used && !owned));
            if (used) CHECK(self != non);  // exclusive among users
        }
    }
}

TEST_CASE("type status over the two-source ownership square") {
    auto w = base_state();
    w.add_use(UseRelation{UnitId("U"), SourceId("S1"), ThemeId("T")});
    w.add_use(UseRelation{UnitId("U"), SourceId("S2"), ThemeId("T")});

    SUBCASE("both owned") {
        auto st = type_status(w, UnitId("U"), SourceTypeId("tau"));
        CHECK(st.tag == SourcingTag::SelfsourcingType);
        CHECK(st.selfsourcing_type);
        CHECK(st.partial_selfsourcing_type);  // full implies partial
        CHECK(!st.non_selfsourcing_type);
        CHECK(!st.partial_non_selfsourcing_type);
    }
    SUBCASE("mixed ownership") {
        w.sources.at(SourceId("S2")).owner = UnitId("V");
        auto st = type_status(w, UnitId("U"), SourceTypeId("tau"));
        CHECK(st.tag == SourcingTag::PartialSelfsourcingType);
        CHECK(!st.selfsourcing_type);
        CHECK(!st.non_selfsourcing_type);
        CHECK(st.partial_selfsourcing_type);
        CHECK(st.partial_non_selfsourcing_type);
    }
    SUBCASE("both foreign") {
        w.sources.at(SourceId("S1")).owner = UnitId("V");
        w.sources.at(SourceId("S2")).owner = UnitId("V");
        auto st = type_status(w, UnitId("U"), SourceTypeId("tau"));
        CHECK(st.tag == SourcingTag::NonSelfsourcingType);
        CHECK(st.non_selfsourcing_type);
        CHECK(st.partial_non_selfsourcing_type);
    }
    SUBCASE("no use at all") {
        w.use_relations.clear();
        auto st = type_status(w, UnitId("U"), SourceTypeId("tau"));
        CHECK(st.tag == SourcingTag::NotUsing);
        CHECK(!st.partial_selfsourcing_type);
        CHECK(!st.partial_non_selfsourcing_type);
    }
}

TEST_CASE("a production chain closes to all five members") {
    WorldState w;
    w.units.emplace(UnitId("U"), Unit{UnitId("U"), "U", {}, {}});
    w.source_types.emplace(SourceTypeId("t"), SourceType{SourceTypeId("t"), false});
    for (const char* s : {"machine", "premises", "site", "crew", "team"}) {
        w.sources.emplace(SourceId(s), Source{SourceId(s), SourceTypeId("t"), UnitId("U"), "", {}, false});
    }
    w.sources.at(SourceId("machine")).depends_on = {SourceId("premises"), SourceId("crew")};
    w.sources.at(SourceId("premises")).depends_on = {SourceId("site")};
    w.sources.at(SourceId("crew")).depends_on = {SourceId("team")};

    auto closure = dependency_closure(w, SourceId("machine"));
    CHECK(closure.size() == 5);
    // symmetric: starting from a leaf reaches the whole cluster too
    CHECK(dependency_closure(w, SourceId("site")) == closure);

    w.sources.emplace(SourceId("lone"),
                      Source{SourceId("lone"), SourceTypeId("t"), UnitId("U"), "", {}, false});
    auto lone = dependency_closure(w, SourceId("lone"));
    CHECK(lone == std::set<SourceId>{SourceId("lone")});
}

TEST_CASE("closure stays inside its cluster") {
    WorldState w;
    w.units.emplace(UnitId("U"), Unit{UnitId("U"), "U", {}, {}});
    w.source_types.emplace(SourceTypeId("t"), SourceType{SourceTypeId("t"), false});
    for (const char* s : {"a1", "a2", "b1", "b2"}) {
        w.sources.emplace(SourceId(s), Source{SourceId(s), SourceTypeId("t"), UnitId("U"), "", {}, false});
    }
    w.sources.at(SourceId("a1")).depends_on = {SourceId("a2")};
    w.sources.at(SourceId("b1")).depends_on = {SourceId("b2")};
    auto ca = dependency_closure(w, SourceId("a1"));
    CHECK(ca == std::set<SourceId>{SourceId("a1"), SourceId("a2")});
    CHECK(ca.count(SourceId("b1")) == 0);
}

TEST_CASE("random states agree with the quantifier oracle") {
    testgen::Rng rng(20260823u);
    for (int round = 0; round < 200; ++round) {
        auto w = testgen::random_state(rng);
        for (const auto& [uid, unit] : w.units) {
            for (const auto& [sid, src] : w.sources) {
                bool used = oracle_uses(w, uid, sid);
                CHECK(uses(w, uid, sid) == used);
                CHECK(selfsourcing_for_source(w, uid, sid) == (used && src.owner == uid));
                CHECK(non_selfsourcing_for_source(w, uid, sid) == (used && !(src.owner == uid)));
            }
            for (const auto& [tid, type] : w.source_types) {
                auto expect = oracle_type(w, uid, tid);
                auto got = type_status(w, uid, tid);
                if (!expect.using_any) {
                    CHECK(got.tag == SourcingTag::NotUsing);
                    continue;
                }
                CHECK(got.selfsourcing_type == expect.self);
                CHECK(got.partial_selfsourcing_type == expect.partial_self);
                CHECK(got.non_selfsourcing_type == expect.non);
                CHECK(got.partial_non_selfsourcing_type == expect.partial_non);
                // implication chains
                if (got.selfsourcing_type) CHECK(got.partial_selfsourcing_type);
                if (got.non_selfsourcing_type) CHECK(got.partial_non_selfsourcing_type);
                CHECK((got.partial_selfsourcing_type || got.partial_non_selfsourcing_type));
            }
        }
    }
}

TEST_CASE("closure agrees with a reachability oracle") {
    testgen::Rng rng(97u);
    for (int round = 0; round < 50; ++round) {
        auto w = testgen::random_state(rng);
        // dense boolean reachability over the symmetric edge set
        std::vector<SourceId> ids;
        for (const auto& [sid, s] : w.sources) ids.push_back(sid);
        auto index = [&](const SourceId& s) {
            return std::find(ids.begin(), ids.end(), s) - ids.begin();
        };
        std::size_t n = ids.size();
        std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
        for (std::size_t i = 0; i < n; ++i) reach[i][i] = true;
        for (const auto& [sid, s] : w.sources) {
            for (const auto& d : s.depends_on) {
                reach[index(sid)][index(d)] = true;
                reach[index(d)][index(sid)] = true;
            }
        }
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    if (reach[i][k] && reach[k][j]) reach[i][j] = true;
        for (std::size_t i = 0; i < n; ++i) {
            auto got = dependency_closure(w, ids[i]);
            std::set<SourceId> expect;
            for (std::size_t j = 0; j < n; ++j)
                if (reach[i][j]) expect.insert(ids[j]);
            CHECK(got == expect);
        }
    }
}
