#include "core/digest.hpp"

#include <cstdint>

#include "core/error.hpp"
#include "core/json_io.hpp"
#include "core/model.hpp"

namespace stratos {

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    static const char* hex = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = hex[h & 0xF];
        h >>= 4;
    }
    return out;
}

std::string digest_of_json(const nlohmann::json& j) { return fnv1a_hex(j.dump()); }

std::string state_digest(const WorldState& state) {
    Diagnostics ds = validate_state(state);
    if (has_errors(ds)) {
        std::string first;
        for (const auto& d : ds) {
            if (d.severity == Severity::Error) {
                first = d.code;
                break;
            }
        }
        throw Error(Errc::InvalidState, first, "state does not validate: " + first);
    }
    Json j = state_to_json(state);
    // Event back-references are provenance metadata, not structural content;
    // two states reached along different step decompositions must agree.
    for (auto& sj : j["sourcements"]) sj.erase("history");
    return digest_of_json(j);
}

std::string sourcement_digest(const Sourcement& s) {
    Json j = sourcement_to_json(s);
    j.erase("history");
    return digest_of_json(j);
}

}  // namespace stratos
