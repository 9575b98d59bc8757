#include <algorithm>
#include <set>

#include "core/error.hpp"
#include "core/validate.hpp"
#include "dsl/dsl.hpp"
#include "dsl/lexer.hpp"

namespace stratos {

namespace {

using dsl::Tok;
using dsl::Token;

struct Recovery {};

const std::set<std::string> kStatements = {
    "unit",     "source_type", "source",           "theme", "use",  "contract",
    "commit",   "unit_commitment", "sourcement",   "business", "contract_overlay",
    "douts",    "pattern",     "lot",              "bid",   "apply", "assert"};

const std::set<std::string> kApplyKeys = {
    "actor", "time",  "to",           "sources",        "type",        "theme",
    "sourcement", "service", "source", "commit",        "compensation", "assign",
    "prior_contract", "mission_tie",  "partition",      "expect"};

struct RefSite {
    std::string token;
    std::string family;  // unit, source, source_type, theme, contract, sourcement, fact
    std::string context;
    int line = 0;
    int column = 0;
};

struct PendingPattern {
    PatternDecl decl;
    Token stmt;
    std::vector<Token> vary;
};

struct PendingLot {
    LotDecl decl;
    Token stmt;
    std::vector<Token> members;
};

struct Parser {
    Parser(const std::vector<Token>& t, const std::vector<std::string>& l, Diagnostics& d,
           Scenario& s)
        : toks(t), lines(l), diags(d), sc(s) {}

    const std::vector<Token>& toks;
    const std::vector<std::string>& lines;
    Diagnostics& diags;
    Scenario& sc;
    std::size_t pos = 0;
    bool script_started = false;

    std::vector<RefSite> refs;
    std::set<std::string> business_labels;
    std::set<std::string> promise_ids;
    std::set<std::string> agreement_ids;
    std::vector<PendingPattern> pending_patterns;
    std::vector<PendingLot> pending_lots;

    const Token& peek(std::size_t ahead = 0) const {
        std::size_t i = pos + ahead;
        return i < toks.size() ? toks[i] : toks.back();
    }

    Token next() {
        const Token& t = peek();
        if (pos + 1 < toks.size()) ++pos;
        return t;
    }

    bool at(Tok k) const { return peek().kind == k; }

    bool accept(Tok k) {
        if (!at(k)) return false;
        next();
        return true;
    }

    void report(const Token& t, std::string code, std::vector<std::string> entities,
                std::string message, Severity sev = Severity::Error) {
        Diagnostic d;
        d.severity = sev;
        d.code = std::move(code);
        d.entities = std::move(entities);
        d.message = std::move(message);
        d.line = t.line;
        d.column = t.column;
        if (t.line >= 1 && t.line <= static_cast<int>(lines.size())) {
            d.excerpt = lines[t.line - 1];
        }
        diags.push_back(d);
    }

    [[noreturn]] void fail(const Token& t, const std::string& message) {
        report(t, "SYNTAX", {}, message);
        throw Recovery{};
    }

    Token expect(Tok k, const std::string& what) {
        if (!at(k)) fail(peek(), "expected " + what);
        return next();
    }

    Token expect_ident(const std::string& what) { return expect(Tok::Ident, what); }

    void expect_keyword(const std::string& kw) {
        Token t = expect_ident("'" + kw + "'");
        if (t.text != kw) fail(t, "expected '" + kw + "'");
    }

    std::int64_t expect_int(const std::string& what) {
        Token t = expect(Tok::Int, what);
        try {
            return std::stoll(t.text);
        } catch (...) {
            fail(t, "integer out of range");
        }
    }

    bool expect_bool(const std::string& what) {
        Token t = expect_ident(what);
        if (t.text == "true") return true;
        if (t.text == "false") return false;
        fail(t, "expected true or false");
    }

    std::string expect_string(const std::string& what) {
        return expect(Tok::String, what).text;
    }

    void ref(const Token& t, std::string family, std::string context) {
        refs.push_back(RefSite{t.text, std::move(family), std::move(context), t.line, t.column});
    }

    // [a, b, c]; empty list allowed
    std::vector<Token> id_list(const std::string& what) {
        std::vector<Token> out;
        expect(Tok::LBracket, "'['");
        if (accept(Tok::RBracket)) return out;
        out.push_back(expect_ident(what));
        while (accept(Tok::Comma)) out.push_back(expect_ident(what));
        expect(Tok::RBracket, "']'");
        return out;
    }

    Rational rational_value() {
        Token a = peek();
        std::int64_t num = expect_int("a number");
        if (!accept(Tok::Slash)) return Rational::whole(num);
        std::int64_t den = expect_int("a denominator");
        if (den == 0) fail(a, "zero denominator");
        return Rational(num, den);
    }

    void declaration_guard(const Token& t, const std::string& kind) {
        if (script_started) {
            report(t, "DECLARATION_AFTER_SCRIPT", {kind},
                   "declarations must precede the script");
        }
    }

    void duplicate(const Token& t, const std::string& family, const std::string& id) {
        report(t, "DUPLICATE_ID", {id}, family + " '" + id + "' is declared twice");
    }

    // ----------------------------------------------------------------- unit
    void parse_unit(const Token& kw) {
        declaration_guard(kw, "unit");
        Token id = expect_ident("a unit id");
        Unit u;
        u.id = UnitId(id.text);
        if (accept(Tok::LBrace)) {
            while (!at(Tok::RBrace) && !at(Tok::End)) {
                Token key = expect_ident("a unit field");
                expect(Tok::Equals, "'='");
                if (key.text == "name") {
                    u.name = expect_string("a name");
                } else if (key.text == "parent") {
                    Token p = expect_ident("a unit id");
                    ref(p, "unit", "parent of unit '" + id.text + "'");
                    u.parent = UnitId(p.text);
                } else if (key.text == "mission") {
                    u.mission = expect_string("a mission");
                } else {
                    fail(key, "unknown unit field '" + key.text + "'");
                }
            }
            expect(Tok::RBrace, "'}'");
        }
        if (sc.world.has_unit(u.id)) {
            duplicate(id, "unit", id.text);
            return;
        }
        sc.world.units.emplace(u.id, std::move(u));
    }

    // ---------------------------------------------------------- source_type
    void parse_source_type(const Token& kw) {
        declaration_guard(kw, "source_type");
        Token id = expect_ident("a source type id");
        SourceType st;
        st.id = SourceTypeId(id.text);
        if (at(Tok::Ident) && peek().text == "singleton") {
            next();
            expect(Tok::Equals, "'='");
            st.singleton = expect_bool("the singleton flag");
        }
        if (sc.world.has_source_type(st.id)) {
            duplicate(id, "source type", id.text);
            return;
        }
        sc.world.source_types.emplace(st.id, st);
    }

    // ---------------------------------------------------------------- source
    void parse_source(const Token& kw) {
        declaration_guard(kw, "source");
        Token id = expect_ident("a source id");
        expect(Tok::Colon, "':'");
        Token type = expect_ident("a source type");
        ref(type, "source_type", "type of source '" + id.text + "'");
        expect_keyword("owned_by");
        Token owner = expect_ident("an owner unit");
        ref(owner, "unit", "owner of source '" + id.text + "'");
        Source s;
        s.id = SourceId(id.text);
        s.type = SourceTypeId(type.text);
        s.owner = UnitId(owner.text);
        while (at(Tok::Ident) && peek(1).kind == Tok::Equals) {
            Token key = next();
            next();
            if (key.text == "descriptor") {
                s.descriptor = expect_string("a descriptor");
            } else if (key.text == "depends_on") {
                for (const Token& d : id_list("a source id")) {
                    ref(d, "source", "dependency of source '" + id.text + "'");
                    s.depends_on.push_back(SourceId(d.text));
                }
            } else if (key.text == "management_function") {
                s.management_function = expect_bool("the management_function flag");
            } else {
                fail(key, "unknown source field '" + key.text + "'");
            }
        }
        if (sc.world.has_source(s.id)) {
            duplicate(id, "source", id.text);
            return;
        }
        sc.world.sources.emplace(s.id, std::move(s));
    }

    // ---------------------------------------------------------------- theme
    void parse_theme(const Token& kw) {
        declaration_guard(kw, "theme");
        Token id = expect_ident("a theme id");
        expect_keyword("by");
        Token maint = expect_ident("a maintainer unit");
        ref(maint, "unit", "maintainer of theme '" + id.text + "'");
        Theme t;
        t.id = ThemeId(id.text);
        t.maintainer = UnitId(maint.text);
        while (at(Tok::Ident) && peek(1).kind == Tok::Equals) {
            Token key = next();
            next();
            if (key.text == "name") {
                t.name = expect_string("a name");
            } else if (key.text == "cluster") {
                t.cluster = expect_string("a cluster");
            } else {
                fail(key, "unknown theme field '" + key.text + "'");
            }
        }
        if (sc.world.has_theme(t.id)) {
            duplicate(id, "theme", id.text);
            return;
        }
        sc.world.themes.emplace(t.id, std::move(t));
    }

    // ------------------------------------------------------------------ use
    void parse_use(const Token& kw) {
        declaration_guard(kw, "use");
        Token user = expect_ident("a user unit");
        Token source = expect_ident("a source id");
        expect_keyword("for");
        Token theme = expect_ident("a theme id");
        ref(user, "unit", "user in use relation");
        ref(source, "source", "source in use relation");
        ref(theme, "theme", "theme in use relation");
        UseRelation ur{UnitId(user.text), SourceId(source.text), ThemeId(theme.text)};
        if (sc.world.has_use(ur)) {
            report(user, "DUPLICATE_ID", {user.text, source.text, theme.text},
                   "use relation is declared twice");
            return;
        }
        sc.world.add_use(ur);
    }

    // ------------------------------------------------------------- contract
    void parse_contract(const Token& kw) {
        declaration_guard(kw, "contract");
        Token id = expect_ident("a contract id");
        ServiceContract c;
        c.id = ContractId(id.text);
        c.compensation = Compensation::ForContractDuration;
        bool provider = false, consumer = false, theme = false;
        while (at(Tok::Ident) && peek(1).kind == Tok::Equals) {
            Token key = next();
            next();
            if (key.text == "provider") {
                Token u = expect_ident("a unit id");
                ref(u, "unit", "provider of contract '" + id.text + "'");
                c.provider = UnitId(u.text);
                provider = true;
            } else if (key.text == "consumer") {
                Token u = expect_ident("a unit id");
                ref(u, "unit", "consumer of contract '" + id.text + "'");
                c.consumer = UnitId(u.text);
                consumer = true;
            } else if (key.text == "theme") {
                Token t = expect_ident("a theme id");
                ref(t, "theme", "theme of contract '" + id.text + "'");
                c.theme = ThemeId(t.text);
                theme = true;
            } else if (key.text == "period") {
                expect(Tok::LParen, "'('");
                c.period_start = expect_int("a start time");
                expect(Tok::Comma, "','");
                c.period_end = expect_int("an end time");
                expect(Tok::RParen, "')'");
            } else if (key.text == "notice") {
                c.notice_interval = expect_int("a notice interval");
            } else if (key.text == "termination") {
                c.termination_protocol = expect_string("a termination protocol");
            } else if (key.text == "compensation") {
                Token n = expect_ident("a compensation name");
                auto comp = compensation_from_name(n.text);
                if (!comp) fail(n, "unknown compensation '" + n.text + "'");
                c.compensation = *comp;
            } else if (key.text == "commitment_terms") {
                Token n = expect_ident("a commitment terms name");
                auto terms = commitment_terms_from_name(n.text);
                if (!terms) fail(n, "unknown commitment terms '" + n.text + "'");
                c.intentional_commitment_terms = *terms;
            } else {
                fail(key, "unknown contract field '" + key.text + "'");
            }
        }
        if (!provider || !consumer || !theme) {
            report(id, "SYNTAX", {id.text},
                   "contract '" + id.text + "' needs provider, consumer and theme");
        }
        if (sc.world.has_contract(c.id)) {
            duplicate(id, "contract", id.text);
            return;
        }
        sc.world.contracts.emplace(c.id, std::move(c));
    }

    // --------------------------------------------------------------- commit
    void parse_commit(const Token& kw) {
        declaration_guard(kw, "commit");
        Token unit = expect_ident("a unit id");
        expect_keyword("to");
        Token source = expect_ident("a source id");
        ref(unit, "unit", "committed unit");
        ref(source, "source", "committed source");
        std::string origin = "declared";
        if (at(Tok::Ident) && peek().text == "via") {
            next();
            Token c = expect_ident("a contract id");
            ref(c, "contract", "origin contract of commitment");
            origin = "contract:" + c.text;
        } else if (at(Tok::Ident) && peek().text == "origin") {
            next();
            expect(Tok::Equals, "'='");
            origin = expect_string("an origin");
        }
        SourceCommitment cm;
        cm.id = derived_commitment_id(UnitId(unit.text), SourceId(source.text));
        cm.committed_unit = UnitId(unit.text);
        cm.source = SourceId(source.text);
        cm.origin = origin;
        if (sc.world.commitments.count(cm.id)) {
            report(unit, "DUPLICATE_ID", {unit.text, source.text},
                   "commitment of '" + unit.text + "' to '" + source.text +
                       "' is declared twice");
            return;
        }
        sc.world.commitments.emplace(cm.id, std::move(cm));
    }

    // ----------------------------------------------------- unit_commitment
    void parse_unit_commitment(const Token& kw) {
        declaration_guard(kw, "unit_commitment");
        Token consumer = expect_ident("a unit id");
        expect_keyword("to");
        Token provider = expect_ident("a unit id");
        ref(consumer, "unit", "unit commitment consumer");
        ref(provider, "unit", "unit commitment provider");
        UnitId key(consumer.text);
        if (sc.world.unit_commitments.count(key)) {
            report(consumer, "DUPLICATE_ID", {consumer.text},
                   "unit commitment of '" + consumer.text + "' is declared twice");
            return;
        }
        sc.world.unit_commitments.emplace(key, UnitId(provider.text));
    }

    // ----------------------------------------------------------- sourcement
    void parse_sourcement(const Token& kw) {
        declaration_guard(kw, "sourcement");
        Token id = expect_ident("a sourcement id");
        expect_keyword("of");
        Token principal = expect_ident("a principal unit");
        ref(principal, "unit", "principal of sourcement '" + id.text + "'");
        Sourcement sm;
        sm.id = id.text;
        sm.principal = UnitId(principal.text);
        expect_keyword("themes");
        expect(Tok::Equals, "'='");
        for (const Token& t : id_list("a theme id")) {
            ref(t, "theme", "theme of sourcement '" + id.text + "'");
            sm.themes.push_back(ThemeId(t.text));
        }
        expect(Tok::LBrace, "'{'");
        auto ref_list = [&](std::vector<SourceId>& into, const std::string& key) {
            for (const Token& t : id_list("a source id")) {
                ref(t, "source", key + " of sourcement '" + id.text + "'");
                into.push_back(SourceId(t.text));
            }
        };
        while (!at(Tok::RBrace) && !at(Tok::End)) {
            Token key = expect_ident("a sourcement field");
            if (key.text == "basic") {
                Token owner = expect_ident("an owner unit");
                ref(owner, "unit", "basic owner in sourcement '" + id.text + "'");
                expect(Tok::Equals, "'='");
                BasicSourcement b;
                b.owner = UnitId(owner.text);
                for (const Token& t : id_list("a source id")) {
                    ref(t, "source", "basic member in sourcement '" + id.text + "'");
                    b.sources.push_back(SourceId(t.text));
                }
                std::sort(b.sources.begin(), b.sources.end());
                b.sources.erase(std::unique(b.sources.begin(), b.sources.end()),
                                b.sources.end());
                sm.basics.push_back(std::move(b));
                continue;
            }
            expect(Tok::Equals, "'='");
            if (key.text == "thematic_operations") {
                sm.attributes.thematic_operations = expect_string("a description");
            } else if (key.text == "intellectual_property") {
                sm.attributes.intellectual_property = expect_string("a description");
            } else if (key.text == "data_knowledge_software") {
                sm.attributes.data_knowledge_software = expect_string("a description");
            } else if (key.text == "location") {
                ref_list(sm.attributes.location, "location");
            } else if (key.text == "facilities") {
                ref_list(sm.attributes.facilities, "facilities");
            } else if (key.text == "operational_staff") {
                ref_list(sm.attributes.operational_staff, "operational_staff");
            } else if (key.text == "managing_staff") {
                ref_list(sm.attributes.managing_staff, "managing_staff");
            } else if (key.text == "contract_management_staff") {
                ref_list(sm.attributes.contract_management_staff, "contract_management_staff");
            } else if (key.text == "directing_staff") {
                ref_list(sm.attributes.directing_staff, "directing_staff");
            } else if (key.text == "unstable_until") {
                sm.unstable_deadline = expect_int("a deadline");
            } else {
                fail(key, "unknown sourcement field '" + key.text + "'");
            }
        }
        expect(Tok::RBrace, "'}'");
        if (sc.world.sourcements.count(sm.id)) {
            duplicate(id, "sourcement", id.text);
            return;
        }
        sc.world.sourcements.emplace(sm.id, std::move(sm));
    }

    // ------------------------------------------------------------- business
    void parse_business(const Token& kw) {
        declaration_guard(kw, "business");
        Token unit = expect_ident("a unit id");
        ref(unit, "unit", "business overlay unit");
        BusinessConfig b;
        b.unit = UnitId(unit.text);
        expect(Tok::LBrace, "'{'");
        auto group = [&](std::vector<BusinessRefGroup>& into, const std::string& what) {
            Token label = expect_ident("a label");
            business_labels.insert(label.text);
            expect(Tok::Equals, "'='");
            BusinessRefGroup g;
            g.label = label.text;
            for (const Token& t : id_list("a fact-layer id")) {
                ref(t, "fact", what + " '" + label.text + "'");
                g.refs.push_back(t.text);
            }
            if (at(Tok::Ident) && peek().text == "note" && peek(1).kind == Tok::Equals) {
                next();
                next();
                g.note = expect_string("a note");
            }
            into.push_back(std::move(g));
        };
        while (!at(Tok::RBrace) && !at(Tok::End)) {
            Token key = expect_ident("a business field");
            if (key.text == "profit_center") {
                group(b.profit_centers, "profit center");
                continue;
            }
            if (key.text == "bleeder") {
                group(b.bleeders, "bleeder");
                continue;
            }
            expect(Tok::Equals, "'='");
            if (key.text == "category") {
                b.business_category = expect_string("a category");
            } else if (key.text == "option") {
                b.operational_options.push_back(expect_string("an option"));
            } else if (key.text == "motive") {
                b.market_acquisition_motives.push_back(expect_string("a motive"));
            } else {
                fail(key, "unknown business field '" + key.text + "'");
            }
        }
        expect(Tok::RBrace, "'}'");
        for (const auto& existing : sc.business) {
            if (existing.unit == b.unit) {
                duplicate(unit, "business overlay", unit.text);
                return;
            }
        }
        sc.business.push_back(std::move(b));
    }

    // ----------------------------------------------------- contract_overlay
    void parse_contract_overlay(const Token& kw) {
        declaration_guard(kw, "contract_overlay");
        ContractConfig c;
        std::set<std::string> local_promises;
        std::vector<std::pair<Token, std::string>> agreement_refs;
        expect(Tok::LBrace, "'{'");
        while (!at(Tok::RBrace) && !at(Tok::End)) {
            Token key = expect_ident("a contract overlay field");
            if (key.text == "scope") {
                expect(Tok::Equals, "'='");
                for (const Token& t : id_list("a unit id")) {
                    ref(t, "unit", "contract overlay scope");
                    c.scope.push_back(UnitId(t.text));
                }
            } else if (key.text == "law") {
                expect(Tok::Equals, "'='");
                c.general_law.push_back(expect_string("a law"));
            } else if (key.text == "trade_rule") {
                expect(Tok::Equals, "'='");
                c.rules_of_trade.push_back(expect_string("a rule"));
            } else if (key.text == "charter") {
                expect(Tok::Equals, "'='");
                c.sustainability_charters.push_back(expect_string("a charter"));
            } else if (key.text == "promise") {
                Token id = expect_ident("a promise id");
                Token from = expect_ident("a unit id");
                expect(Tok::Arrow, "'->'");
                Token to = expect_ident("a unit id");
                std::string text = expect_string("the promise text");
                ref(from, "unit", "promise '" + id.text + "'");
                ref(to, "unit", "promise '" + id.text + "'");
                if (!local_promises.insert(id.text).second) {
                    duplicate(id, "promise", id.text);
                    continue;
                }
                promise_ids.insert(id.text);
                c.promises.push_back(Promise{id.text, UnitId(from.text), UnitId(to.text), text});
            } else if (key.text == "agreement") {
                Token id = expect_ident("an agreement id");
                expect(Tok::Equals, "'='");
                expect(Tok::LParen, "'('");
                Token a = expect_ident("a promise id");
                expect(Tok::Comma, "','");
                Token b = expect_ident("a promise id");
                expect(Tok::RParen, "')'");
                agreement_ids.insert(id.text);
                agreement_refs.emplace_back(a, id.text);
                agreement_refs.emplace_back(b, id.text);
                c.agreements.push_back(Agreement{id.text, a.text, b.text});
            } else if (key.text == "contract") {
                Token id = expect_ident("a contract id");
                ref(id, "contract", "contract overlay listing");
                c.contracts.push_back(ContractId(id.text));
            } else {
                fail(key, "unknown contract overlay field '" + key.text + "'");
            }
        }
        expect(Tok::RBrace, "'}'");
        for (const auto& [t, agreement] : agreement_refs) {
            if (!local_promises.count(t.text)) {
                report(t, "UNRESOLVED_REF", {agreement, t.text},
                       "agreement '" + agreement + "' pairs an undeclared promise");
            }
        }
        sc.contract_overlays.push_back(std::move(c));
    }

    // ---------------------------------------------------------------- douts
    void parse_douts(const Token& kw) {
        declaration_guard(kw, "douts");
        Token id = expect_ident("a block id");
        DoutsInput in;
        expect(Tok::LBrace, "'{'");
        while (!at(Tok::RBrace) && !at(Tok::End)) {
            Token key = expect_ident("a field");
            if (key.text == "lift") {
                Token name = expect_ident("a lift condition");
                if (name.text == "process_stable") {
                    in.lift_conditions.process_stable = true;
                } else if (name.text == "more_economic_than_split") {
                    in.lift_conditions.more_economic_than_split = true;
                } else if (name.text == "incorporation_plausible") {
                    in.lift_conditions.incorporation_plausible = true;
                } else if (name.text == "risk_enabled_by_contract") {
                    in.lift_conditions.risk_enabled_by_contract = true;
                } else if (name.text == "positive_asset_value_shared") {
                    in.lift_conditions.positive_asset_value_shared = true;
                } else {
                    fail(name, "unknown lift condition '" + name.text + "'");
                }
                continue;
            }
            expect(Tok::Equals, "'='");
            if (key.text == "service_contracted") {
                in.service_contracted = expect_bool("a flag");
            } else if (key.text == "sources_transferred") {
                in.sources_transferred = expect_bool("a flag");
            } else if (key.text == "independent_markets") {
                in.independent_markets_as_economic = expect_bool("a flag");
            } else if (key.text == "initial_production") {
                in.initial_production_by_transferred_sources = expect_bool("a flag");
            } else if (key.text == "service_volume") {
                in.service_volume = rational_value();
            } else if (key.text == "transferred_volume") {
                in.transferred_production_volume = rational_value();
            } else if (key.text == "multi_party") {
                in.multi_party = expect_bool("a flag");
            } else {
                fail(key, "unknown field '" + key.text + "'");
            }
        }
        expect(Tok::RBrace, "'}'");
        if (sc.douts.count(id.text)) {
            duplicate(id, "douts block", id.text);
            return;
        }
        sc.douts.emplace(id.text, in);
    }

    // -------------------------------------------------------------- pattern
    void parse_pattern(const Token& kw) {
        declaration_guard(kw, "pattern");
        Token id = expect_ident("a pattern id");
        expect_keyword("from");
        expect_keyword("sourcement");
        Token smid = expect_ident("a sourcement id");
        ref(smid, "sourcement", "pattern '" + id.text + "'");
        expect_keyword("vary");
        PendingPattern p;
        p.decl.id = id.text;
        p.decl.sourcement = smid.text;
        p.stmt = id;
        p.vary = id_list("a unit or source id");
        for (const Token& t : p.vary) p.decl.vary.push_back(t.text);
        if (sc.patterns.count(id.text)) {
            duplicate(id, "pattern", id.text);
            return;
        }
        sc.patterns.emplace(id.text, p.decl);
        pending_patterns.push_back(std::move(p));
    }

    // ------------------------------------------------------------------ lot
    void parse_lot(const Token& kw) {
        declaration_guard(kw, "lot");
        Token id = expect_ident("a lot id");
        expect(Tok::Equals, "'='");
        PendingLot l;
        l.decl.id = id.text;
        l.stmt = id;
        l.members = id_list("a pattern id");
        for (const Token& t : l.members) l.decl.patterns.push_back(t.text);
        if (sc.lots.count(id.text)) {
            duplicate(id, "lot", id.text);
            return;
        }
        sc.lots.emplace(id.text, l.decl);
        pending_lots.push_back(std::move(l));
    }

    // ------------------------------------------------------------------ bid
    void parse_bid(const Token& kw) {
        declaration_guard(kw, "bid");
        Token id = expect_ident("a bid id");
        expect_keyword("on");
        Token lot = expect_ident("a lot id");
        ref(lot, "lot", "bid '" + id.text + "'");
        Bid b;
        b.id = id.text;
        b.lot = lot.text;
        auto binding_key = [&]() {
            if (at(Tok::Int)) {
                Token index = next();
                expect(Tok::Dot, "'.'");
                Token name = expect_ident("a variable name");
                return index.text + "." + name.text;
            }
            return expect_ident("a variable name").text;
        };
        if (at(Tok::Ident) && peek().text == "bind") {
            next();
            while (true) {
                std::string key = binding_key();
                expect(Tok::Equals, "'='");
                Token value = expect_ident("a bound id");
                if (!b.bindings.emplace(key, value.text).second) {
                    report(value, "DUPLICATE_ID", {id.text, key},
                           "bid '" + id.text + "' binds '" + key + "' twice");
                }
                if (!accept(Tok::Comma)) break;
            }
        }
        if (at(Tok::Ident) && peek().text == "offering") {
            next();
            for (const Token& t : id_list("a source id")) {
                b.offered_insourcing.push_back(SourceId(t.text));
            }
        }
        if (sc.bids.count(id.text)) {
            duplicate(id, "bid", id.text);
            return;
        }
        sc.bids.emplace(id.text, std::move(b));
    }

    // ---------------------------------------------------------------- apply
    void parse_apply(const Token& kw) {
        (void)kw;
        Token kind = expect_ident("a transformation kind");
        auto k = transform_kind_from_name(kind.text);
        if (!k) fail(kind, "unknown transformation kind '" + kind.text + "'");
        ScriptItem item;
        item.spec.kind = *k;
        item.line = kind.line;
        script_started = true;
        while (at(Tok::Ident) && kApplyKeys.count(peek().text) &&
               peek(1).kind == Tok::Equals) {
            Token key = next();
            next();
            if (key.text == "actor") {
                item.spec.actor = UnitId(expect_ident("a unit id").text);
            } else if (key.text == "time") {
                item.time = expect_int("a time");
            } else if (key.text == "to") {
                for (const Token& t : id_list("a unit id")) {
                    item.spec.counterparties.push_back(UnitId(t.text));
                }
            } else if (key.text == "sources") {
                for (const Token& t : id_list("a source id")) {
                    item.spec.subject.sources.push_back(SourceId(t.text));
                }
            } else if (key.text == "type") {
                item.spec.subject.type = SourceTypeId(expect_ident("a source type").text);
            } else if (key.text == "theme") {
                item.spec.subject.theme = ThemeId(expect_ident("a theme id").text);
            } else if (key.text == "sourcement") {
                item.spec.subject.sourcement = expect_ident("a sourcement id").text;
            } else if (key.text == "service") {
                item.spec.service = service_payload();
            } else if (key.text == "source") {
                item.spec.source_payload = source_payload();
            } else if (key.text == "commit") {
                for (const Token& t : id_list("a source id")) {
                    item.spec.commitments_to_create.push_back(SourceId(t.text));
                }
            } else if (key.text == "compensation") {
                Token n = expect_ident("a compensation name");
                auto comp = compensation_from_name(n.text);
                if (!comp) fail(n, "unknown compensation '" + n.text + "'");
                item.spec.compensation = *comp;
            } else if (key.text == "assign") {
                expect(Tok::LBracket, "'['");
                if (!accept(Tok::RBracket)) {
                    while (true) {
                        Token s = expect_ident("a source id");
                        expect(Tok::Arrow, "'->'");
                        Token u = expect_ident("a unit id");
                        item.spec.assignments[SourceId(s.text)] = UnitId(u.text);
                        if (!accept(Tok::Comma)) break;
                    }
                    expect(Tok::RBracket, "']'");
                }
            } else if (key.text == "prior_contract") {
                item.spec.prior_contract = ContractId(expect_ident("a contract id").text);
            } else if (key.text == "mission_tie") {
                item.spec.mission_tie = expect_bool("the mission tie attestation");
            } else if (key.text == "partition") {
                expect(Tok::LBracket, "'['");
                if (!accept(Tok::RBracket)) {
                    while (true) {
                        std::vector<SourceId> part;
                        for (const Token& t : id_list("a source id")) {
                            part.push_back(SourceId(t.text));
                        }
                        item.spec.partition.push_back(std::move(part));
                        if (!accept(Tok::Comma)) break;
                    }
                    expect(Tok::RBracket, "']'");
                }
            } else if (key.text == "expect") {
                item.expect = expect_ident("a precondition code").text;
            }
        }
        sc.script.push_back(std::move(item));
    }

    ServicePayload service_payload() {
        ServicePayload p;
        expect(Tok::LBrace, "'{'");
        while (!at(Tok::RBrace) && !at(Tok::End)) {
            Token key = expect_ident("a service field");
            expect(Tok::Equals, "'='");
            if (key.text == "id") {
                p.id = ContractId(expect_ident("a contract id").text);
            } else if (key.text == "theme") {
                p.theme = ThemeId(expect_ident("a theme id").text);
            } else if (key.text == "period") {
                expect(Tok::LParen, "'('");
                p.period_start = expect_int("a start time");
                expect(Tok::Comma, "','");
                p.period_end = expect_int("an end time");
                expect(Tok::RParen, "')'");
            } else if (key.text == "notice") {
                p.notice_interval = expect_int("a notice interval");
            } else if (key.text == "termination") {
                p.termination_protocol = expect_string("a termination protocol");
            } else if (key.text == "compensation") {
                Token n = expect_ident("a compensation name");
                auto comp = compensation_from_name(n.text);
                if (!comp) fail(n, "unknown compensation '" + n.text + "'");
                p.compensation = *comp;
            } else if (key.text == "commitment_terms") {
                Token n = expect_ident("a commitment terms name");
                auto terms = commitment_terms_from_name(n.text);
                if (!terms) fail(n, "unknown commitment terms '" + n.text + "'");
                p.intentional_commitment_terms = *terms;
            } else {
                fail(key, "unknown service field '" + key.text + "'");
            }
        }
        expect(Tok::RBrace, "'}'");
        return p;
    }

    SourcePayload source_payload() {
        SourcePayload p;
        expect(Tok::LBrace, "'{'");
        while (!at(Tok::RBrace) && !at(Tok::End)) {
            Token key = expect_ident("a source field");
            expect(Tok::Equals, "'='");
            if (key.text == "id") {
                p.id = SourceId(expect_ident("a source id").text);
            } else if (key.text == "type") {
                p.type = SourceTypeId(expect_ident("a source type").text);
            } else if (key.text == "descriptor") {
                p.descriptor = expect_string("a descriptor");
            } else if (key.text == "depends_on") {
                for (const Token& t : id_list("a source id")) {
                    p.depends_on.push_back(SourceId(t.text));
                }
            } else if (key.text == "management_function") {
                p.management_function = expect_bool("the management_function flag");
            } else if (key.text == "use_for") {
                p.use_for = ThemeId(expect_ident("a theme id").text);
            } else {
                fail(key, "unknown source field '" + key.text + "'");
            }
        }
        expect(Tok::RBrace, "'}'");
        return p;
    }

    // --------------------------------------------------------------- assert
    void parse_assert(const Token& kw) {
        AssertionItem a;
        a.line = kw.line;
        a.after_step = sc.script.size();
        while (at(Tok::Ident) || at(Tok::Int)) {
            a.query.push_back(next().text);
        }
        if (a.query.empty()) fail(peek(), "expected a query");
        expect(Tok::EqEq, "'=='");
        if (at(Tok::String)) {
            a.expected = next().text;
        } else if (at(Tok::Int)) {
            Token n = next();
            a.expected = n.text;
            if (accept(Tok::Slash)) {
                a.expected += "/" + expect(Tok::Int, "a denominator").text;
            }
        } else {
            a.expected = expect_ident("an expected value").text;
        }
        sc.assertions.push_back(std::move(a));
    }

    // ------------------------------------------------------------ dispatch
    void statement() {
        Token kw = next();
        const std::string& s = kw.text;
        if (s == "unit") return parse_unit(kw);
        if (s == "source_type") return parse_source_type(kw);
        if (s == "source") return parse_source(kw);
        if (s == "theme") return parse_theme(kw);
        if (s == "use") return parse_use(kw);
        if (s == "contract") return parse_contract(kw);
        if (s == "commit") return parse_commit(kw);
        if (s == "unit_commitment") return parse_unit_commitment(kw);
        if (s == "sourcement") return parse_sourcement(kw);
        if (s == "business") return parse_business(kw);
        if (s == "contract_overlay") return parse_contract_overlay(kw);
        if (s == "douts") return parse_douts(kw);
        if (s == "pattern") return parse_pattern(kw);
        if (s == "lot") return parse_lot(kw);
        if (s == "bid") return parse_bid(kw);
        if (s == "apply") return parse_apply(kw);
        if (s == "assert") return parse_assert(kw);
        fail(kw, "unknown statement '" + s + "'");
    }

    void recover() {
        int depth = 0;
        if (!at(Tok::End)) next();
        while (!at(Tok::End)) {
            const Token& t = peek();
            if (t.kind == Tok::LBrace || t.kind == Tok::LBracket || t.kind == Tok::LParen) {
                ++depth;
            } else if (t.kind == Tok::RBrace || t.kind == Tok::RBracket ||
                       t.kind == Tok::RParen) {
                if (depth > 0) --depth;
            } else if (depth == 0 && t.kind == Tok::Ident && kStatements.count(t.text)) {
                return;
            }
            next();
        }
    }

    void run() {
        while (!at(Tok::End)) {
            if (!at(Tok::Ident)) {
                report(peek(), "SYNTAX", {}, "expected a statement keyword");
                recover();
                continue;
            }
            try {
                statement();
            } catch (const Recovery&) {
                recover();
            }
        }
        finalize();
    }

    // ------------------------------------------------------------ finalize
    void derive_patterns() {
        for (auto& p : pending_patterns) {
            auto smit = sc.world.sourcements.find(p.decl.sourcement);
            if (smit == sc.world.sourcements.end()) continue;  // ref pass reports it
            std::set<UnitId> vary_units;
            std::set<SourceId> vary_sources;
            bool bad = false;
            for (const Token& t : p.vary) {
                if (sc.world.has_unit(UnitId(t.text))) {
                    vary_units.insert(UnitId(t.text));
                } else if (sc.world.has_source(SourceId(t.text))) {
                    vary_sources.insert(SourceId(t.text));
                } else {
                    report(t, "UNRESOLVED_REF", {t.text},
                           "vary entry '" + t.text + "' names no unit or source");
                    bad = true;
                }
            }
            if (bad) continue;
            try {
                Pattern derived =
                    abstract_sourcement(sc.world, smit->second, vary_units, vary_sources);
                derived.id = p.decl.id;
                sc.patterns.at(p.decl.id).derived = std::move(derived);
            } catch (const Error& e) {
                std::string code = e.code() == Errc::UnknownEntity ? "UNRESOLVED_REF"
                                                                   : errc_name(e.code());
                report(p.stmt, code, {p.decl.id}, e.what());
            }
        }
    }

    void derive_lots() {
        for (auto& l : pending_lots) {
            Lot derived;
            derived.id = l.decl.id;
            bool complete = true;
            for (const Token& t : l.members) {
                auto pit = sc.patterns.find(t.text);
                if (pit == sc.patterns.end()) {
                    report(t, "UNRESOLVED_REF", {l.decl.id, t.text},
                           "lot '" + l.decl.id + "' lists no pattern '" + t.text + "'");
                    complete = false;
                    continue;
                }
                derived.patterns.push_back(pit->second.derived);
            }
            for (const Diagnostic& d : lot_diagnostics(derived)) {
                Diagnostic located = d;
                located.line = l.stmt.line;
                located.column = l.stmt.column;
                if (l.stmt.line >= 1 && l.stmt.line <= static_cast<int>(lines.size())) {
                    located.excerpt = lines[l.stmt.line - 1];
                }
                diags.push_back(located);
            }
            if (complete) sc.lots.at(l.decl.id).derived = std::move(derived);
        }
    }

    void resolve_refs() {
        const WorldState& w = sc.world;
        std::set<std::string> contract_layer;
        for (const auto& [id, c] : w.contracts) contract_layer.insert(id.str());
        for (const auto& [id, cm] : w.commitments) contract_layer.insert(id.str());
        contract_layer.insert(promise_ids.begin(), promise_ids.end());
        contract_layer.insert(agreement_ids.begin(), agreement_ids.end());

        auto fact_token = [&](const std::string& t) {
            return w.has_unit(UnitId(t)) || w.has_source(SourceId(t)) ||
                   w.has_source_type(SourceTypeId(t)) || w.has_theme(ThemeId(t));
        };
        for (const RefSite& r : refs) {
            bool ok = false;
            if (r.family == "unit") {
                ok = w.has_unit(UnitId(r.token));
            } else if (r.family == "source") {
                ok = w.has_source(SourceId(r.token));
            } else if (r.family == "source_type") {
                ok = w.has_source_type(SourceTypeId(r.token));
            } else if (r.family == "theme") {
                ok = w.has_theme(ThemeId(r.token));
            } else if (r.family == "contract") {
                ok = w.has_contract(ContractId(r.token));
            } else if (r.family == "sourcement") {
                ok = w.sourcements.count(r.token) != 0;
            } else if (r.family == "lot") {
                ok = sc.lots.count(r.token) != 0;
            } else {
                ok = fact_token(r.token);
            }
            if (ok) continue;
            Diagnostic d;
            if (r.family != "contract" && contract_layer.count(r.token)) {
                d = error_diag("STRATIFICATION_VIOLATION", {r.token},
                               r.context + " reaches upward into the contract layer");
            } else if (business_labels.count(r.token)) {
                d = error_diag("STRATIFICATION_VIOLATION", {r.token},
                               r.context + " must resolve in the fact layer");
            } else {
                d = error_diag("UNRESOLVED_REF", {r.token}, r.context + " does not resolve");
            }
            d.line = r.line;
            d.column = r.column;
            if (r.line >= 1 && r.line <= static_cast<int>(lines.size())) {
                d.excerpt = lines[r.line - 1];
            }
            diags.push_back(d);
        }
    }

    void finalize() {
        std::sort(sc.business.begin(), sc.business.end(),
                  [](const BusinessConfig& a, const BusinessConfig& b) {
                      return a.unit < b.unit;
                  });
        derive_patterns();
        derive_lots();
        resolve_refs();
        // reference and stratification findings are already located above;
        // keep only the structural ones from deep validation
        for (const Diagnostic& d : validate_all(sc.world, sc.business, sc.contract_overlays)) {
            if (d.code == "UNRESOLVED_REF" || d.code == "STRATIFICATION_VIOLATION") continue;
            diags.push_back(d);
        }
    }
};

}  // namespace

ParseResult parse_scenario(const std::string& text) {
    ParseResult r;
    try {
        std::vector<std::string> lines;
        std::vector<Token> toks = dsl::lex(text, r.diagnostics, lines);
        Parser p(toks, lines, r.diagnostics, r.scenario);
        p.run();
    } catch (const std::exception& e) {
        r.diagnostics.push_back(
            error_diag("SYNTAX", {}, std::string("parse failed: ") + e.what()));
    } catch (...) {
        r.diagnostics.push_back(error_diag("SYNTAX", {}, "parse failed"));
    }
    r.ok = !has_errors(r.diagnostics);
    return r;
}

}  // namespace stratos
