#ifndef STRATOS_DOUTS_DOUTS_HPP
#define STRATOS_DOUTS_DOUTS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "core/json_io.hpp"

namespace stratos {

// Exact rational with a normalized sign and no common factor. Good enough
// for scores in [0,1] and small volume ratios; overflow is not a concern at
// these magnitudes.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Rational() = default;
    Rational(std::int64_t n, std::int64_t d);
    static Rational whole(std::int64_t n) { return Rational(n, 1); }

    Rational operator*(const Rational& o) const;
    Rational operator+(const Rational& o) const;
    bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
    bool operator!=(const Rational& o) const { return !(*this == o); }
    bool operator<(const Rational& o) const;
    bool operator<=(const Rational& o) const { return *this < o || *this == o; }

    bool negative() const { return num < 0; }
    bool zero() const { return num == 0; }
    double approx() const { return static_cast<double>(num) / static_cast<double>(den); }
    std::string str() const;
};

struct LiftConditions {
    bool process_stable = false;
    bool more_economic_than_split = false;
    bool incorporation_plausible = false;
    bool risk_enabled_by_contract = false;
    bool positive_asset_value_shared = false;

    int count() const;
};

struct DoutsInput {
    bool service_contracted = false;
    bool sources_transferred = false;
    bool independent_markets_as_economic = false;
    bool initial_production_by_transferred_sources = false;
    LiftConditions lift_conditions;
    Rational service_volume = Rational::whole(0);
    Rational transferred_production_volume = Rational::whole(0);
    bool multi_party = false;
};

struct DoutsScore {
    Rational value;
    std::vector<std::string> rule_trace;
};

// Scores how closely a transaction matches the archetypal outsourcing.
// Throws Errc::InvalidInput when a volume is negative or a production volume
// is reported without a transfer.
DoutsScore score(const DoutsInput& input);

DoutsInput douts_input_from_json(const Json& j);
Json douts_input_to_json(const DoutsInput& in);
Json douts_score_to_json(const DoutsScore& s);

}  // namespace stratos

#endif
