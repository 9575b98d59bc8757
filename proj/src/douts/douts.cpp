#include "douts/douts.hpp"

#include <numeric>
#include <sstream>

#include "core/error.hpp"

namespace stratos {

Rational::Rational(std::int64_t n, std::int64_t d) {
    if (d == 0) throw Error(Errc::InvalidInput, "ZERO_DENOMINATOR", "rational with denominator 0");
    if (d < 0) {
        n = -n;
        d = -d;
    }
    std::int64_t g = std::gcd(n < 0 ? -n : n, d);
    if (g == 0) g = 1;
    num = n / g;
    den = d / g;
}

Rational Rational::operator*(const Rational& o) const {
    return Rational(num * o.num, den * o.den);
}

Rational Rational::operator+(const Rational& o) const {
    return Rational(num * o.den + o.num * den, den * o.den);
}

bool Rational::operator<(const Rational& o) const {
    return num * o.den < o.num * den;
}

std::string Rational::str() const {
    std::ostringstream oss;
    oss << num;
    if (den != 1) oss << "/" << den;
    return oss.str();
}

int LiftConditions::count() const {
    return (process_stable ? 1 : 0) + (more_economic_than_split ? 1 : 0) +
           (incorporation_plausible ? 1 : 0) + (risk_enabled_by_contract ? 1 : 0) +
           (positive_asset_value_shared ? 1 : 0);
}

DoutsScore score(const DoutsInput& input) {
    if (input.service_volume.negative() || input.transferred_production_volume.negative()) {
        throw Error(Errc::InvalidInput, "NEGATIVE_VOLUME", "volumes must be non-negative");
    }
    if (!input.sources_transferred && !input.transferred_production_volume.zero()) {
        throw Error(Errc::InvalidInput, "VOLUME_WITHOUT_TRANSFER",
                    "a production volume needs a transfer to produce it");
    }

    DoutsScore out;
    if (!input.service_contracted || !input.sources_transferred) {
        out.value = Rational::whole(0);
        out.rule_trace = {"rule_1", "rule_3"};
        if (input.multi_party) out.rule_trace.push_back("rule_8");
        return out;
    }
    if (input.independent_markets_as_economic) {
        out.value = Rational::whole(0);
        out.rule_trace = {"rule_2", "rule_3"};
        if (input.multi_party) out.rule_trace.push_back("rule_8");
        return out;
    }

    Rational base(7, 20);
    if (input.initial_production_by_transferred_sources) {
        int k = input.lift_conditions.count();
        base = Rational(7, 10) + Rational(3, 10) * Rational(k, 5);
        out.rule_trace.push_back("rule_4");
        if (k == 5) {
            out.rule_trace.push_back("rule_5");
        } else if (k > 0) {
            out.rule_trace.push_back("rule_5");
            out.rule_trace.push_back("engine_linear_interpolation");
        }
    } else {
        // the rules place this region only somewhere below the initial
        // production threshold; the flat midpoint is an engine choice
        out.rule_trace.push_back("engine_base_below_rule4");
    }

    out.value = base;
    const Rational& vs = input.service_volume;
    const Rational& vp = input.transferred_production_volume;
    if (!vs.zero() && !vp.zero() && vs != vp) {
        Rational lo = vs < vp ? vs : vp;
        Rational hi = vs < vp ? vp : vs;
        out.value = base * Rational(lo.num * hi.den, lo.den * hi.num);
        out.rule_trace.push_back(vp < vs ? "rule_6" : "rule_7");
    }
    if (input.multi_party) out.rule_trace.push_back("rule_8");
    return out;
}

namespace {

Rational rational_from_json(const Json& j, const char* field) {
    if (j.is_number_integer()) return Rational::whole(j.get<std::int64_t>());
    if (j.is_array() && j.size() == 2 && j[0].is_number_integer() && j[1].is_number_integer()) {
        return Rational(j[0].get<std::int64_t>(), j[1].get<std::int64_t>());
    }
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        std::istringstream iss(s);
        std::int64_t n = 0;
        std::int64_t d = 1;
        char slash = 0;
        if (!(iss >> n)) {
            throw Error(Errc::InvalidInput, "BAD_SHAPE",
                        std::string(field) + " is not a rational");
        }
        if (iss >> slash) {
            if (slash != '/' || !(iss >> d)) {
                throw Error(Errc::InvalidInput, "BAD_SHAPE",
                            std::string(field) + " is not a rational");
            }
        }
        return Rational(n, d);
    }
    throw Error(Errc::InvalidInput, "BAD_SHAPE",
                std::string(field) + " must be an integer, a \"p/q\" string, or a [p,q] pair");
}

bool flag(const Json& j, const char* field) {
    if (!j.contains(field)) return false;
    if (!j.at(field).is_boolean()) {
        throw Error(Errc::InvalidInput, "BAD_SHAPE", std::string(field) + " must be a boolean");
    }
    return j.at(field).get<bool>();
}

}  // namespace

DoutsInput douts_input_from_json(const Json& j) {
    if (!j.is_object()) {
        throw Error(Errc::InvalidInput, "BAD_SHAPE", "a scoring input must be an object");
    }
    DoutsInput in;
    in.service_contracted = flag(j, "service_contracted");
    in.sources_transferred = flag(j, "sources_transferred");
    in.independent_markets_as_economic = flag(j, "independent_markets_as_economic");
    in.initial_production_by_transferred_sources =
        flag(j, "initial_production_by_transferred_sources");
    if (j.contains("lift_conditions")) {
        const Json& l = j.at("lift_conditions");
        in.lift_conditions.process_stable = flag(l, "process_stable");
        in.lift_conditions.more_economic_than_split = flag(l, "more_economic_than_split");
        in.lift_conditions.incorporation_plausible = flag(l, "incorporation_plausible");
        in.lift_conditions.risk_enabled_by_contract = flag(l, "risk_enabled_by_contract");
        in.lift_conditions.positive_asset_value_shared = flag(l, "positive_asset_value_shared");
    }
    if (j.contains("service_volume")) {
        in.service_volume = rational_from_json(j.at("service_volume"), "service_volume");
    }
    if (j.contains("transferred_production_volume")) {
        in.transferred_production_volume =
            rational_from_json(j.at("transferred_production_volume"),
                               "transferred_production_volume");
    }
    in.multi_party = flag(j, "multi_party");
    return in;
}

Json douts_input_to_json(const DoutsInput& in) {
    Json j;
    j["service_contracted"] = in.service_contracted;
    j["sources_transferred"] = in.sources_transferred;
    j["independent_markets_as_economic"] = in.independent_markets_as_economic;
    j["initial_production_by_transferred_sources"] = in.initial_production_by_transferred_sources;
    Json l;
    l["process_stable"] = in.lift_conditions.process_stable;
    l["more_economic_than_split"] = in.lift_conditions.more_economic_than_split;
    l["incorporation_plausible"] = in.lift_conditions.incorporation_plausible;
    l["risk_enabled_by_contract"] = in.lift_conditions.risk_enabled_by_contract;
    l["positive_asset_value_shared"] = in.lift_conditions.positive_asset_value_shared;
    j["lift_conditions"] = l;
    j["service_volume"] = in.service_volume.str();
    j["transferred_production_volume"] = in.transferred_production_volume.str();
    j["multi_party"] = in.multi_party;
    return j;
}

Json douts_score_to_json(const DoutsScore& s) {
    Json j;
    j["value"] = s.value.str();
    j["value_approx"] = s.value.approx();
    Json trace = Json::array();
    for (const auto& t : s.rule_trace) trace.push_back(t);
    j["rule_trace"] = trace;
    return j;
}

}  // namespace stratos
