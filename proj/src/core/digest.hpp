#ifndef STRATOS_CORE_DIGEST_HPP
#define STRATOS_CORE_DIGEST_HPP

#include <string>

#include <json.hpp>

namespace stratos {

// FNV-1a 64-bit over a canonical dump (object keys sorted by the json type,
// arrays as stored). Returned as 16 lowercase hex digits.
std::string fnv1a_hex(const std::string& bytes);
std::string digest_of_json(const nlohmann::json& j);

}  // namespace stratos

#endif
