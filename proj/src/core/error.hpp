#ifndef STRATOS_CORE_ERROR_HPP
#define STRATOS_CORE_ERROR_HPP

#include <optional>
#include <stdexcept>
#include <string>

namespace stratos {

enum class Errc {
    UnknownEntity,
    InvalidState,
    PreconditionFailed,
    UndefinedOperation,
    NoDelta,
    InconsistentLog,
    StepFailed,
    PreMismatch,
    InvalidInput,
    PrincipalNotAbstractable,
    UnboundVariable,
    SortMismatch,
    Io,
};

const char* errc_name(Errc c);
std::optional<Errc> errc_from_name(const std::string& name);

class Error : public std::runtime_error {
public:
    Error(Errc code, std::string message)
        : std::runtime_error(std::move(message)), code_(code) {}
    Error(Errc code, std::string detail, std::string message)
        : std::runtime_error(std::move(message)), code_(code), detail_(std::move(detail)) {}

    Errc code() const { return code_; }
    // Machine-readable sub-code, e.g. which precondition failed.
    const std::string& detail() const { return detail_; }

private:
    Errc code_;
    std::string detail_;
};

[[noreturn]] inline void throw_unknown(const std::string& family, const std::string& id) {
    throw Error(Errc::UnknownEntity, "unknown " + family + " '" + id + "'");
}

}  // namespace stratos

#endif
