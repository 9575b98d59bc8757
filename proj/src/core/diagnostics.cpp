#include "core/diagnostics.hpp"

#include <sstream>

namespace stratos {

const char* severity_name(Severity s) {
    switch (s) {
        case Severity::Info: return "info";
        case Severity::Warning: return "warning";
        case Severity::Error: return "error";
    }
    return "error";
}

std::string Diagnostic::render() const {
    std::ostringstream os;
    os << severity_name(severity) << " " << code;
    if (line > 0) {
        os << " at " << line << ":" << column;
    }
    if (!entities.empty()) {
        os << " [";
        for (std::size_t i = 0; i < entities.size(); ++i) {
            if (i) os << ", ";
            os << entities[i];
        }
        os << "]";
    }
    if (!message.empty()) os << ": " << message;
    if (!excerpt.empty()) os << "\n    " << excerpt;
    return os.str();
}

}  // namespace stratos
