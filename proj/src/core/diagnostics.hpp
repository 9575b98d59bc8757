#ifndef STRATOS_CORE_DIAGNOSTICS_HPP
#define STRATOS_CORE_DIAGNOSTICS_HPP

#include <string>
#include <vector>

namespace stratos {

enum class Severity { Info, Warning, Error };

const char* severity_name(Severity s);

// One finding from validation or parsing. `entities` carries the offending
// ids; `line`/`column` are 1-based and zero when the finding has no source
// location (state-level validation).
struct Diagnostic {
    Severity severity = Severity::Error;
    std::string code;
    std::vector<std::string> entities;
    std::string message;
    int line = 0;
    int column = 0;
    std::string excerpt;  // one-line source excerpt for parse diagnostics

    std::string render() const;
};

using Diagnostics = std::vector<Diagnostic>;

inline bool has_errors(const Diagnostics& ds) {
    for (const auto& d : ds)
        if (d.severity == Severity::Error) return true;
    return false;
}

inline Diagnostic error_diag(std::string code, std::vector<std::string> entities,
                             std::string message) {
    return Diagnostic{Severity::Error, std::move(code), std::move(entities),
                      std::move(message), 0, 0, {}};
}

inline Diagnostic warning_diag(std::string code, std::vector<std::string> entities,
                               std::string message) {
    return Diagnostic{Severity::Warning, std::move(code), std::move(entities),
                      std::move(message), 0, 0, {}};
}

inline Diagnostic info_diag(std::string code, std::vector<std::string> entities,
                            std::string message) {
    return Diagnostic{Severity::Info, std::move(code), std::move(entities),
                      std::move(message), 0, 0, {}};
}

}  // namespace stratos

#endif
