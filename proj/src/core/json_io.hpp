#ifndef STRATOS_CORE_JSON_IO_HPP
#define STRATOS_CORE_JSON_IO_HPP

#include <json.hpp>

#include "core/model.hpp"

namespace stratos {

using Json = nlohmann::json;

// Stable snake_case interchange format. Collections serialize sorted by id;
// optional scalar fields are omitted when absent; list-valued fields are
// always present. `state_from_json` throws Errc::InvalidInput on shape
// errors.

Json state_to_json(const WorldState& state);
WorldState state_from_json(const Json& j);

Json sourcement_to_json(const Sourcement& s);
Sourcement sourcement_from_json(const Json& j);

Json event_to_json(const HistoryEvent& e);
HistoryEvent event_from_json(const Json& j);
Json log_to_json(const HistoryLog& log);
HistoryLog log_from_json(const Json& j);

Json business_to_json(const BusinessConfig& b);
Json contract_config_to_json(const ContractConfig& c);

Json diagnostic_to_json(const Diagnostic& d);
Json diagnostics_to_json(const Diagnostics& ds);

}  // namespace stratos

#endif
