// Eight go/no-go checks over the whole engine, one verdict line each.
// Exits nonzero when any check fails.
#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "core/error.hpp"
#include "core/json_io.hpp"
#include "core/model.hpp"
#include "douts/douts.hpp"
#include "dsl/dsl.hpp"
#include "patterns/patterns.hpp"
#include "relations/relations.hpp"
#include "runner/runner.hpp"
#include "transformations/transformations.hpp"
#include "transitions/transitions.hpp"

namespace {

using namespace stratos;

// ---------------------------------------------------------------------------
// Harness
// ---------------------------------------------------------------------------

struct Outcome {
    bool ok = true;
    std::string detail;
};

class Check {
public:
    explicit Check(Outcome& out) : out_(out) {}

    void require(bool cond, const std::string& why) {
        if (!cond && out_.ok) {
            out_.ok = false;
            out_.detail = why;
        }
    }

private:
    Outcome& out_;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::Io, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string corpus_path(const std::string& name) {
    return std::string(STRATOS_CORPUS_DIR) + "/" + name;
}

struct Rng {
    std::mt19937 g;
    explicit Rng(std::uint32_t seed) : g(seed) {}
    int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(g); }
    bool chance(double p) { return std::uniform_real_distribution<double>(0.0, 1.0)(g) < p; }
    template <class T>
    const T& choose(const std::vector<T>& v) {
        return v[static_cast<std::size_t>(pick(0, static_cast<int>(v.size()) - 1))];
    }
};

// ---------------------------------------------------------------------------
// Small-state generator
// ---------------------------------------------------------------------------

const std::vector<std::string> kThemeNames = {"meals", "cleaning", "records", "care"};

WorldState gen_world(Rng& rng) {
    WorldState w;
    std::vector<UnitId> units;
    int nu = rng.pick(2, 4);
    for (int k = 0; k < nu; ++k) {
        Unit u;
        u.id = UnitId("U" + std::to_string(k));
        u.name = "unit " + std::to_string(k);
        w.units.emplace(u.id, u);
        units.push_back(u.id);
    }
    std::vector<SourceTypeId> types;
    int nt = rng.pick(1, 3);
    for (int k = 0; k < nt; ++k) {
        SourceType t;
        t.id = SourceTypeId("T" + std::to_string(k));
        t.singleton = k > 0 && rng.chance(0.15);
        w.source_types.emplace(t.id, t);
        types.push_back(t.id);
    }
    std::map<UnitId, std::vector<ThemeId>> themes_of;
    int theme_seq = 0;
    for (const auto& u : units) {
        int n = rng.pick(1, 2);
        for (int k = 0; k < n; ++k) {
            Theme th;
            th.id = ThemeId("H" + std::to_string(theme_seq++));
            th.maintainer = u;
            th.name = rng.choose(kThemeNames);
            w.themes.emplace(th.id, th);
            themes_of[u].push_back(th.id);
        }
    }
    int ns = rng.pick(2, 6);
    for (int k = 0; k < ns; ++k) {
        Source s;
        s.id = SourceId("S" + std::to_string(k));
        s.owner = rng.choose(units);
        s.type = rng.choose(types);
        if (w.source_types.at(s.type).singleton) {
            for (const auto& [sid, other] : w.sources) {
                if (other.type == s.type && other.owner == s.owner) {
                    s.type = types.front();  // first type is never singleton
                    break;
                }
            }
        }
        s.descriptor = "crew " + std::to_string(k);
        s.management_function = rng.chance(0.1);
        w.sources.emplace(s.id, s);
    }
    for (const auto& [sid, s] : w.sources) {
        if (rng.chance(0.85)) {
            w.add_use(UseRelation{s.owner, sid, rng.choose(themes_of[s.owner])});
        }
        if (units.size() > 1 && rng.chance(0.2)) {
            UnitId other = rng.choose(units);
            if (!(other == s.owner)) {
                w.add_use(UseRelation{other, sid, rng.choose(themes_of[other])});
            }
        }
    }
    if (rng.chance(0.4)) {
        for (const auto& u : units) {
            auto owned = sources_owned_by(w, u);
            if (owned.size() < 2) continue;
            Sourcement sm;
            sm.id = "M0";
            sm.principal = u;
            sm.themes = {themes_of[u].front()};
            BasicSourcement basic;
            basic.owner = u;
            basic.sources = {owned[0], owned[1]};
            std::sort(basic.sources.begin(), basic.sources.end());
            sm.basics.push_back(basic);
            if (rng.chance(0.3)) sm.attributes.operational_staff = {owned[0]};
            if (rng.chance(0.3)) sm.attributes.thematic_operations = "runs the floor";
            for (const auto& v : units) {
                if (v == u || !rng.chance(0.25)) continue;
                auto theirs = sources_owned_by(w, v);
                if (theirs.empty()) continue;
                BasicSourcement foreign;
                foreign.owner = v;
                foreign.sources = {theirs.front()};
                sm.basics.push_back(foreign);
                break;
            }
            if (rng.chance(0.2)) sm.unstable_deadline = w.timestamp + 10;
            w.sourcements.emplace(sm.id, sm);
            break;
        }
    }
    w.timestamp = rng.pick(0, 9);
    return w;
}

// A world already carrying service contracts, so successor transformations
// have something to follow up on. U0 consumes from U1; U2 already serves a
// third client under the same theme name.
WorldState gen_contract_world(Rng& rng) {
    WorldState w;
    std::vector<UnitId> units;
    for (int k = 0; k < 4; ++k) {
        Unit u;
        u.id = UnitId("U" + std::to_string(k));
        u.name = "unit " + std::to_string(k);
        w.units.emplace(u.id, u);
        units.push_back(u.id);
    }
    SourceType t;
    t.id = SourceTypeId("T0");
    w.source_types.emplace(t.id, t);

    Theme h0{ThemeId("H0"), units[0], "meals", std::nullopt};
    Theme hx{ThemeId("HX"), units[3], "meals", std::nullopt};
    w.themes.emplace(h0.id, h0);
    w.themes.emplace(hx.id, hx);

    Source sv;
    sv.id = SourceId("SV");
    sv.type = t.id;
    sv.owner = units[1];
    sv.descriptor = "vendor crew";
    w.sources.emplace(sv.id, sv);
    w.add_use(UseRelation{units[0], sv.id, h0.id});

    Source sw;
    sw.id = SourceId("SW");
    sw.type = t.id;
    sw.owner = units[2];
    sw.descriptor = "shared kitchen";
    w.sources.emplace(sw.id, sw);
    w.add_use(UseRelation{units[3], sw.id, hx.id});

    if (rng.chance(0.5)) {
        Source s2;
        s2.id = SourceId("S2");
        s2.type = t.id;
        s2.owner = units[0];
        s2.descriptor = "own crew";
        w.sources.emplace(s2.id, s2);
        w.add_use(UseRelation{units[0], s2.id, h0.id});
    }

    ServiceContract c1;
    c1.id = ContractId("C1");
    c1.provider = units[1];
    c1.consumer = units[0];
    c1.theme = h0.id;
    c1.period_end = 60;
    c1.notice_interval = 6;
    c1.termination_protocol = "return on notice";
    w.contracts.emplace(c1.id, c1);

    ServiceContract c0;
    c0.id = ContractId("C0");
    c0.provider = units[2];
    c0.consumer = units[3];
    c0.theme = hx.id;
    c0.period_end = 60;
    c0.notice_interval = 6;
    c0.termination_protocol = "return on notice";
    w.contracts.emplace(c0.id, c0);

    if (rng.chance(0.5)) {
        SourceCommitment cm;
        cm.id = derived_commitment_id(units[0], sv.id);
        cm.committed_unit = units[0];
        cm.source = sv.id;
        cm.origin = "contract:C1";
        w.commitments.emplace(cm.id, cm);
    }
    if (rng.chance(0.25)) w.unit_commitments.emplace(units[0], units[2]);
    w.timestamp = rng.pick(0, 9);
    return w;
}

// ---------------------------------------------------------------------------
// Candidate transformations for a state
// ---------------------------------------------------------------------------

ServicePayload make_service(int& fresh, const ThemeId& theme, Rng& rng) {
    ServicePayload p;
    p.id = ContractId("C" + std::to_string(fresh++));
    p.theme = theme;
    p.period_start = 0;
    p.period_end = 40 + rng.pick(0, 20);
    p.notice_interval = rng.pick(1, 6);
    p.termination_protocol = "wind down";
    p.compensation = rng.chance(0.5) ? Compensation::ForContractDuration
                                     : Compensation::TemporallyDivided;
    if (rng.chance(0.3)) {
        p.intentional_commitment_terms = CommitmentTerms::IntentionallyNonCommitting;
    }
    return p;
}

std::vector<UnitId> other_units(const WorldState& w, const UnitId& u) {
    std::vector<UnitId> out;
    for (const auto& [id, unit] : w.units) {
        if (!(id == u)) out.push_back(id);
    }
    return out;
}

std::vector<TransformationSpec> candidates(const WorldState& w, const HistoryLog& log,
                                           Rng& rng, int& fresh) {
    std::vector<TransformationSpec> out;
    for (const auto& [uid, unit] : w.units) {
        auto others = other_units(w, uid);
        if (others.empty()) continue;

        // sources this unit both owns and uses, with the carrying theme
        std::vector<std::pair<SourceId, ThemeId>> self_sourced;
        for (const auto& ur : w.use_relations) {
            if (ur.user == uid && w.has_source(ur.source) && w.owner_of(ur.source) == uid &&
                w.has_theme(ur.theme) && w.theme(ur.theme).maintainer == uid) {
                self_sourced.emplace_back(ur.source, ur.theme);
            }
        }
        if (!self_sourced.empty()) {
            const auto& [s, theme] = self_sourced.front();
            TransformationSpec ts;
            ts.kind = TransformKind::Outsource;
            ts.actor = uid;
            ts.counterparties = {rng.choose(others)};
            ts.subject.sources = {s};
            ts.service = make_service(fresh, theme, rng);
            if (rng.chance(0.5)) ts.commitments_to_create = {s};
            out.push_back(ts);
        }

        for (const auto& [tau, st] : w.source_types) {
            auto used = used_sources_of_type(w, uid, tau);
            if (used.empty()) continue;
            bool all_owned = true;
            for (const auto& s : used) all_owned &= w.owner_of(s) == uid;
            if (!all_owned) continue;
            TransformationSpec ts;
            ts.kind = TransformKind::OutsourceOfType;
            ts.actor = uid;
            ts.counterparties = {rng.choose(others)};
            ts.subject.type = tau;
            for (const auto& ur : w.use_relations) {
                if (ur.user == uid && ur.source == used.front()) {
                    ts.service = make_service(fresh, ur.theme, rng);
                    break;
                }
            }
            if (ts.service) out.push_back(ts);
        }

        // takeover of a source the counterparty runs itself
        for (const auto& ur : w.use_relations) {
            if (ur.user == uid || !w.has_source(ur.source)) continue;
            if (!(w.owner_of(ur.source) == ur.user)) continue;
            if (!w.has_theme(ur.theme) || !(w.theme(ur.theme).maintainer == ur.user)) continue;
            TransformationSpec ts;
            ts.kind = TransformKind::Insource;
            ts.actor = uid;
            ts.counterparties = {ur.user};
            ts.subject.sources = {ur.source};
            ts.service = make_service(fresh, ur.theme, rng);
            if (rng.chance(0.4)) ts.commitments_to_create = {ur.source};
            out.push_back(ts);
            break;
        }

        auto owned = sources_owned_by(w, uid);
        if (!owned.empty()) {
            TransformationSpec ext;
            ext.kind = TransformKind::SourceExternalization;
            ext.actor = uid;
            ext.counterparties = {rng.choose(others)};
            ext.subject.sources = {rng.choose(owned)};
            out.push_back(ext);

            const SourceId& s = rng.choose(owned);
            bool committed = false;
            for (const auto& [cid, cm] : w.commitments) committed |= cm.source == s;
            if (!committed) {
                TransformationSpec drop;
                drop.kind = TransformKind::DropSource;
                drop.actor = uid;
                drop.subject.sources = {s};
                out.push_back(drop);
            }
        }
        for (const auto& v : others) {
            auto theirs = sources_owned_by(w, v);
            if (theirs.empty()) continue;
            TransformationSpec ts;
            ts.kind = TransformKind::SourceInternalization;
            ts.actor = uid;
            ts.counterparties = {v};
            ts.subject.sources = {rng.choose(theirs)};
            out.push_back(ts);
            break;
        }

        if (w.sources.size() < 6) {
            std::vector<SourceTypeId> safe;
            for (const auto& [tid, st] : w.source_types) {
                if (!st.singleton) {
                    safe.push_back(tid);
                    continue;
                }
                bool owns_one = false;
                for (const auto& [sid, s] : w.sources) {
                    owns_one |= s.type == tid && s.owner == uid;
                }
                if (!owns_one) safe.push_back(tid);
            }
            std::vector<ThemeId> own_themes;
            for (const auto& [tid, th] : w.themes) {
                if (th.maintainer == uid) own_themes.push_back(tid);
            }
            if (!safe.empty()) {
                TransformationSpec ts;
                ts.kind = TransformKind::DevelopSource;
                ts.actor = uid;
                SourcePayload p;
                p.id = SourceId("N" + std::to_string(fresh++));
                p.type = rng.choose(safe);
                p.descriptor = "grown in house";
                if (!own_themes.empty() && rng.chance(0.7)) {
                    p.use_for = rng.choose(own_themes);
                }
                ts.source_payload = p;
                out.push_back(ts);
            }
        }

        for (const auto& [smid, sm] : w.sourcements) {
            if (!(sm.principal == uid)) continue;
            for (const auto& basic : sm.basics) {
                if (basic.sources.size() < 2) continue;
                TransformationSpec ts;
                ts.kind = TransformKind::DecomposeSourcement;
                ts.actor = uid;
                ts.subject.sourcement = smid;
                std::size_t half = basic.sources.size() / 2;
                ts.partition = {
                    {basic.sources.begin(), basic.sources.begin() + half},
                    {basic.sources.begin() + half, basic.sources.end()},
                };
                out.push_back(ts);
                break;
            }
        }

        // return of something this unit pushed out earlier
        for (auto it = log.rbegin(); it != log.rend(); ++it) {
            if (!(it->actor == uid)) continue;
            if (it->kind != transform_kind_name(TransformKind::Outsource) &&
                it->kind != transform_kind_name(TransformKind::FollowUpOutsource)) {
                continue;
            }
            for (const auto& m : it->params.moves) {
                if (!w.has_source(m.source) || w.owner_of(m.source) == uid) continue;
                TransformationSpec ts;
                ts.kind = TransformKind::Backsource;
                ts.actor = uid;
                ts.counterparties = {w.owner_of(m.source)};
                ts.subject.sources = {m.source};
                out.push_back(ts);
                break;
            }
            break;
        }

        for (const auto& [cid, c] : w.contracts) {
            if (!(c.consumer == uid)) continue;
            for (const auto& v : others) {
                if (v == c.provider) continue;
                TransformationSpec fu;
                fu.kind = TransformKind::FollowUpOutsource;
                fu.actor = uid;
                fu.counterparties = {v};
                fu.prior_contract = cid;
                fu.service = make_service(fresh, c.theme, rng);
                out.push_back(fu);

                TransformationSpec pr = fu;
                pr.kind = TransformKind::ProgressiveOutsource;
                pr.service = make_service(fresh, c.theme, rng);
                pr.mission_tie = true;
                out.push_back(pr);
            }
        }
    }
    return out;
}

struct AppliedCase {
    WorldState pre;
    TransformationSpec spec;
    HistoryLog log;
    WorldState post;
};

struct SharedCorpus {
    std::vector<AppliedCase> cases;
    int states = 0;  // distinct pre states visited
};

// Records every candidate that applies at each visited state, then advances
// along one of them.
void harvest(WorldState w, Rng& rng, int steps, SharedCorpus& out) {
    HistoryLog log;
    int fresh = 100;
    for (int k = 0; k < steps; ++k) {
        auto cand = candidates(w, log, rng, fresh);
        std::shuffle(cand.begin(), cand.end(), rng.g);
        std::optional<Applied> next;
        for (const auto& ts : cand) {
            try {
                Applied a = apply(w, ts, log);
                out.cases.push_back({w, ts, log, a.state});
                if (!next) next = std::move(a);
            } catch (const Error&) {
            }
        }
        if (!next) break;
        ++out.states;
        w = next->state;
        log = next->log;
    }
}

const SharedCorpus& shared_corpus() {
    static SharedCorpus corpus = [] {
        SharedCorpus out;
        Rng rng(20260823);
        for (int i = 0; i < 120; ++i) {
            WorldState w = gen_world(rng);
            if (!state_valid(w)) continue;
            harvest(w, rng, 3, out);
        }
        for (int i = 0; i < 40; ++i) {
            WorldState w = gen_contract_world(rng);
            if (!state_valid(w)) continue;
            harvest(w, rng, 2, out);
        }
        return out;
    }();
    return corpus;
}

// ---------------------------------------------------------------------------
// Criteria
// ---------------------------------------------------------------------------

Outcome criterion_consequences() {
    Outcome out;
    Check ck(out);
    auto t0 = std::chrono::steady_clock::now();

    const std::vector<std::string> files = {
        "consequence_1.srcm", "consequence_2.srcm", "consequence_3_pre.srcm",
        "consequence_3_post.srcm", "consequence_4.srcm", "consequence_5.srcm",
        "consequence_6.srcm",
    };
    int assertions = 0;
    std::map<std::string, Scenario> parsed;
    for (const auto& name : files) {
        ParseResult r = parse_scenario(read_file(corpus_path(name)));
        ck.require(r.ok, name + " does not parse cleanly");
        if (!r.ok) continue;
        RunReport report = run_scenario(r.scenario);
        ck.require(report.ok, name + " run failed");
        assertions += report.assertions_passed;
        parsed.emplace(name, r.scenario);
    }
    if (out.ok) {
        auto kinds = classify(parsed.at("consequence_3_pre.srcm").world,
                              parsed.at("consequence_3_post.srcm").world, UnitId("U"));
        ck.require(kinds.size() >= 2, "the type-level delta must stay ambiguous");
        ck.require(kinds.count(ClassifiedKind::Outsource) != 0,
                   "the ambiguity set must include the outsourcing reading");
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    ck.require(secs < 1.0, "took " + std::to_string(secs) + "s, budget is 1s");
    if (out.ok) {
        std::ostringstream d;
        d << files.size() << " files, " << assertions << " assertions, "
          << static_cast<int>(secs * 1000) << "ms";
        out.detail = d.str();
    }
    return out;
}

Outcome criterion_score() {
    Outcome out;
    Check ck(out);
    auto t0 = std::chrono::steady_clock::now();

    auto with = [](bool sc, bool st, bool im, bool ip, int lifts) {
        DoutsInput in;
        in.service_contracted = sc;
        in.sources_transferred = st;
        in.independent_markets_as_economic = im;
        in.initial_production_by_transferred_sources = ip;
        in.lift_conditions.process_stable = lifts > 0;
        in.lift_conditions.more_economic_than_split = lifts > 1;
        in.lift_conditions.incorporation_plausible = lifts > 2;
        in.lift_conditions.risk_enabled_by_contract = lifts > 3;
        in.lift_conditions.positive_asset_value_shared = lifts > 4;
        return in;
    };
    auto has = [](const DoutsScore& s, const char* rule) {
        return std::find(s.rule_trace.begin(), s.rule_trace.end(), rule) != s.rule_trace.end();
    };

    DoutsScore none = score(with(false, false, false, false, 0));
    ck.require(none.value == Rational::whole(0), "no contract and no transfer must score 0");
    ck.require(has(none, "rule_1"), "the zero case must cite rule_1");

    DoutsScore markets = score(with(true, true, true, false, 0));
    ck.require(markets.value == Rational::whole(0), "independent markets must score 0");
    ck.require(has(markets, "rule_2"), "the market case must cite rule_2");

    DoutsScore base = score(with(true, true, false, true, 0));
    ck.require(base.value == Rational(7, 10), "the bare initial-production case must score 7/10");
    ck.require(has(base, "rule_4"), "the base case must cite rule_4");

    DoutsScore full = score(with(true, true, false, true, 5));
    ck.require(full.value == Rational::whole(1), "all five conditions must score 1");
    ck.require(has(full, "rule_5"), "the full case must cite rule_5");

    // exhaustive sweep: every lift combination crossed with five volume ratios
    const std::vector<Rational> ratios = {Rational(1, 3), Rational(1, 2), Rational(2, 3),
                                          Rational(3, 4), Rational(1, 1)};
    int cases = 0;
    std::vector<std::vector<Rational>> values(32, std::vector<Rational>(ratios.size()));
    for (int mask = 0; mask < 32; ++mask) {
        DoutsInput in = with(true, true, false, true, 0);
        in.lift_conditions.process_stable = mask & 1;
        in.lift_conditions.more_economic_than_split = mask & 2;
        in.lift_conditions.incorporation_plausible = mask & 4;
        in.lift_conditions.risk_enabled_by_contract = mask & 8;
        in.lift_conditions.positive_asset_value_shared = mask & 16;
        in.service_volume = Rational::whole(1);
        for (std::size_t r = 0; r < ratios.size(); ++r) {
            in.transferred_production_volume = ratios[r];
            DoutsScore s = score(in);
            values[mask][r] = s.value;
            ck.require(!s.value.negative() && s.value <= Rational::whole(1),
                       "scores must stay inside [0,1]");
            ++cases;
        }
    }
    for (int a = 0; a < 32; ++a) {
        for (int b = 0; b < 32; ++b) {
            if ((a & b) != a) continue;  // a's conditions are a subset of b's
            for (std::size_t r = 0; r < ratios.size(); ++r) {
                ck.require(values[a][r] <= values[b][r],
                           "adding a lift condition must never lower the score");
            }
        }
    }
    for (int mask = 0; mask < 32; ++mask) {
        for (std::size_t r = 1; r < ratios.size(); ++r) {
            ck.require(values[mask][r - 1] <= values[mask][r],
                       "closing the volume gap must never lower the score");
        }
    }

    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    ck.require(secs < 1.0, "took " + std::to_string(secs) + "s, budget is 1s");
    if (out.ok) {
        std::ostringstream d;
        d << "4 boundary values, " << cases << " sweep cases, "
          << static_cast<int>(secs * 1000) << "ms";
        out.detail = d.str();
    }
    return out;
}

Outcome criterion_classifier() {
    Outcome out;
    Check ck(out);
    auto t0 = std::chrono::steady_clock::now();

    const SharedCorpus& corpus = shared_corpus();
    const auto& cases = corpus.cases;
    ck.require(corpus.states >= 200,
               "generated only " + std::to_string(corpus.states) + " states");
    std::map<TransformKind, int> per_kind;
    for (const auto& c : cases) {
        auto kinds = classify(c.pre, c.post, c.spec.actor);
        if (kinds.count(to_classified(c.spec.kind)) == 0) {
            ck.require(false, std::string("classification misses '") +
                                  transform_kind_name(c.spec.kind) + "' for actor '" +
                                  c.spec.actor.str() + "'");
            break;
        }
        per_kind[c.spec.kind]++;
    }
    for (int k = 0; k <= static_cast<int>(TransformKind::DevelopSource); ++k) {
        auto kind = static_cast<TransformKind>(k);
        ck.require(per_kind[kind] > 0,
                   std::string("kind '") + transform_kind_name(kind) + "' never applied");
    }

    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    ck.require(secs < 30.0, "took " + std::to_string(secs) + "s, budget is 30s");
    if (out.ok) {
        std::ostringstream d;
        d << corpus.states << " states, " << cases.size() << " applied cases, all 11 kinds, "
          << static_cast<int>(secs * 1000) << "ms";
        out.detail = d.str();
    }
    return out;
}

Outcome criterion_transitions() {
    Outcome out;
    Check ck(out);
    auto t0 = std::chrono::steady_clock::now();

    const auto& cases = shared_corpus().cases;
    int verified = 0;
    int states_checked = 0;
    for (const auto& c : cases) {
        TransitionPlan tp = plan(c.pre, c.spec, c.log);
        Diagnostics diags;
        if (!verify_plan(c.pre, tp, c.spec, c.log, &diags)) {
            std::string why = diags.empty() ? "no diagnostics" : diags.front().message;
            ck.require(false, std::string("plan for '") + transform_kind_name(c.spec.kind) +
                                  "' does not verify: " + why);
            break;
        }
        auto progression = apply_plan(c.pre, tp);
        for (const auto& state : progression) {
            ck.require(state_valid(state),
                       std::string("invalid intermediate state in a '") +
                           transform_kind_name(c.spec.kind) + "' plan");
            ++states_checked;
        }
        ++verified;
        if (!out.ok) break;
    }

    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    ck.require(secs < 30.0, "took " + std::to_string(secs) + "s, budget is 30s");
    if (out.ok) {
        std::ostringstream d;
        d << verified << " plans verified, " << states_checked << " intermediate states valid, "
          << static_cast<int>(secs * 1000) << "ms";
        out.detail = d.str();
    }
    return out;
}

Outcome criterion_patterns() {
    Outcome out;
    Check ck(out);

    // generated worlds plus every scenario file that declares sourcements
    std::vector<WorldState> worlds;
    Rng rng(97);
    for (int i = 0; i < 60; ++i) {
        WorldState w = gen_world(rng);
        if (state_valid(w)) worlds.push_back(w);
    }
    namespace fs = std::filesystem;
    for (const auto& entry : fs::directory_iterator(STRATOS_CORPUS_DIR)) {
        if (entry.path().extension() != ".srcm") continue;
        ParseResult r = parse_scenario(read_file(entry.path().string()));
        if (r.ok && !r.scenario.world.sourcements.empty()) {
            worlds.push_back(r.scenario.world);
        }
    }

    int sourcements = 0;
    int subsets = 0;
    for (const auto& w : worlds) {
        for (const auto& [smid, sm] : w.sourcements) {
            ++sourcements;
            std::vector<UnitId> unit_pool;
            for (const auto& basic : sm.basics) {
                if (!(basic.owner == sm.principal)) unit_pool.push_back(basic.owner);
            }
            std::sort(unit_pool.begin(), unit_pool.end());
            unit_pool.erase(std::unique(unit_pool.begin(), unit_pool.end()), unit_pool.end());
            std::set<SourceId> source_pool;
            for (const auto& basic : sm.basics) {
                source_pool.insert(basic.sources.begin(), basic.sources.end());
            }
            for (const auto* refs : sm.attributes.ref_lists()) {
                source_pool.insert(refs->begin(), refs->end());
            }
            struct Entity {
                bool is_unit;
                std::string id;
            };
            std::vector<Entity> pool;
            for (const auto& u : unit_pool) pool.push_back({true, u.str()});
            for (const auto& s : source_pool) pool.push_back({false, s.str()});

            const std::string original = sourcement_to_json(sm).dump();
            const std::uint32_t limit = 1u << pool.size();
            for (std::uint32_t mask = 0; mask < limit; ++mask) {
                if (__builtin_popcount(mask) > 3) continue;
                std::set<UnitId> vary_units;
                std::set<SourceId> vary_sources;
                std::map<std::string, std::string> bindings;
                for (std::size_t i = 0; i < pool.size(); ++i) {
                    if (!(mask & (1u << i))) continue;
                    if (pool[i].is_unit) {
                        vary_units.insert(UnitId(pool[i].id));
                    } else {
                        vary_sources.insert(SourceId(pool[i].id));
                    }
                    bindings[pool[i].id] = pool[i].id;
                }
                try {
                    Pattern p = abstract_sourcement(w, sm, vary_units, vary_sources);
                    Sourcement back = instantiate(p, bindings);
                    ck.require(sourcement_to_json(back).dump() == original,
                               "round trip changed sourcement '" + smid + "'");
                } catch (const Error& e) {
                    ck.require(false, "round trip threw for '" + smid + "': " + e.what());
                }
                ++subsets;
                if (!out.ok) break;
            }
            if (!out.ok) break;
        }
        if (!out.ok) break;
    }
    ck.require(sourcements > 0, "no sourcements reached the round trip");
    if (out.ok) {
        std::ostringstream d;
        d << sourcements << " sourcements, " << subsets << " vary subsets";
        out.detail = d.str();
    }
    return out;
}

// Naive re-evaluation of the sourcing predicates, written against the
// definitions instead of the engine's helpers.
bool brute_uses(const WorldState& w, const UnitId& u, const SourceId& s) {
    for (const auto& ur : w.use_relations) {
        if (!(ur.user == u) || !(ur.source == s)) continue;
        auto it = w.themes.find(ur.theme);
        if (it != w.themes.end() && it->second.maintainer == u) return true;
    }
    return false;
}

Outcome criterion_relations() {
    Outcome out;
    Check ck(out);

    Rng rng(4242);
    int states = 0;
    long long comparisons = 0;
    for (int i = 0; i < 1000; ++i) {
        WorldState w = gen_world(rng);
        ++states;
        for (const auto& [uid, unit] : w.units) {
            for (const auto& [sid, src] : w.sources) {
                bool bu = brute_uses(w, uid, sid);
                bool bs = bu && src.owner == uid;
                bool bn = bu && !(src.owner == uid);
                ck.require(uses(w, uid, sid) == bu, "uses disagrees");
                ck.require(selfsourcing_for_source(w, uid, sid) == bs,
                           "selfsourcing disagrees");
                ck.require(non_selfsourcing_for_source(w, uid, sid) == bn,
                           "non-selfsourcing disagrees");
                comparisons += 3;
            }
            for (const auto& [tid, st] : w.source_types) {
                bool all_owned = true;
                bool any_owned = false;
                bool all_foreign = true;
                bool any_foreign = false;
                bool any_used = false;
                for (const auto& [sid, src] : w.sources) {
                    if (!(src.type == tid) || !brute_uses(w, uid, sid)) continue;
                    any_used = true;
                    bool owned = src.owner == uid;
                    all_owned &= owned;
                    any_owned |= owned;
                    all_foreign &= !owned;
                    any_foreign |= !owned;
                }
                TypeStatus got = type_status(w, uid, tid);
                ck.require(got.selfsourcing_type == (any_used && all_owned),
                           "selfsourcing for type disagrees");
                ck.require(got.partial_selfsourcing_type == (any_used && any_owned),
                           "partial selfsourcing for type disagrees");
                ck.require(got.non_selfsourcing_type == (any_used && all_foreign),
                           "non-selfsourcing for type disagrees");
                ck.require(got.partial_non_selfsourcing_type == (any_used && any_foreign),
                           "partial non-selfsourcing for type disagrees");
                comparisons += 4;
            }
        }
        if (!out.ok) break;
    }
    if (out.ok) {
        std::ostringstream d;
        d << states << " states, " << comparisons << " predicate comparisons";
        out.detail = d.str();
    }
    return out;
}

Outcome criterion_round_trip() {
    Outcome out;
    Check ck(out);

    namespace fs = std::filesystem;
    int files = 0;
    std::vector<fs::path> paths;
    for (const auto& entry : fs::directory_iterator(STRATOS_CORPUS_DIR)) {
        if (entry.path().extension() == ".srcm") paths.push_back(entry.path());
    }
    std::sort(paths.begin(), paths.end());
    for (const auto& path : paths) {
        ParseResult first = parse_scenario(read_file(path.string()));
        ParseResult second = parse_scenario(print_scenario(first.scenario));
        ck.require(scenario_digest(first.scenario) == scenario_digest(second.scenario),
                   "round trip digest changed for " + path.filename().string());
        ++files;
    }
    ck.require(files >= 14, "expected the full corpus, found " + std::to_string(files));

    Rng rng(777);
    int crashes = 0;
    int flagged = 0;
    int clean = 0;
    for (int i = 0; i < 10000; ++i) {
        int len = rng.pick(0, 255);
        std::string text;
        text.reserve(static_cast<std::size_t>(len));
        for (int k = 0; k < len; ++k) {
            text.push_back(static_cast<char>(rng.pick(0, 255)));
        }
        try {
            ParseResult r = parse_scenario(text);
            if (r.diagnostics.empty()) {
                ++clean;
            } else {
                ++flagged;
            }
        } catch (...) {
            ++crashes;
        }
    }
    ck.require(crashes == 0, std::to_string(crashes) + " fuzz inputs escalated to exceptions");
    if (out.ok) {
        std::ostringstream d;
        d << files << " corpus files round trip, 10000 fuzz inputs (" << flagged
          << " diagnosed, " << clean << " parsed clean, 0 crashes)";
        out.detail = d.str();
    }
    return out;
}

Outcome criterion_layering() {
    Outcome out;
    Check ck(out);

    const std::vector<std::string> files = {
        "stratification_neg_1.srcm",
        "stratification_neg_2.srcm",
        "stratification_neg_3.srcm",
    };
    for (const auto& name : files) {
        ParseResult r = parse_scenario(read_file(corpus_path(name)));
        ck.require(!r.ok, name + " was accepted");
        bool found = false;
        for (const auto& d : r.diagnostics) {
            found |= d.code == "STRATIFICATION_VIOLATION";
        }
        ck.require(found, name + " lacks the layering diagnostic");
    }
    if (out.ok) out.detail = "3 negative files rejected with STRATIFICATION_VIOLATION";
    return out;
}

}  // namespace

int main() {
    struct Criterion {
        const char* title;
        Outcome (*fn)();
    };
    const std::vector<Criterion> criteria = {
        {"consequence suite", criterion_consequences},
        {"score boundaries and monotonicity", criterion_score},
        {"classifier soundness", criterion_classifier},
        {"transition plan equivalence", criterion_transitions},
        {"pattern round trip", criterion_patterns},
        {"relations brute-force oracle", criterion_relations},
        {"round trip and fuzz robustness", criterion_round_trip},
        {"layering enforcement", criterion_layering},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome out;
        try {
            out = criteria[i].fn();
        } catch (const std::exception& e) {
            out.ok = false;
            out.detail = std::string("unexpected exception: ") + e.what();
        }
        if (!out.ok) ++failures;
        std::cout << (out.ok ? "[PASS] " : "[FAIL] ") << "criterion " << i + 1 << ": "
                  << criteria[i].title;
        if (!out.detail.empty()) std::cout << " (" << out.detail << ")";
        std::cout << "\n";
    }
    if (failures) {
        std::cout << failures << " of " << criteria.size() << " criteria failing\n";
        return 1;
    }
    std::cout << "all " << criteria.size() << " criteria passing\n";
    return 0;
}
