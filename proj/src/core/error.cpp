#include "core/error.hpp"

namespace stratos {

const char* errc_name(Errc e) {
    switch (e) {
        case Errc::UnknownEntity: return "UNKNOWN_ENTITY";
        case Errc::InvalidState: return "INVALID_STATE";
        case Errc::PreconditionFailed: return "PRECONDITION_FAILED";
        case Errc::UndefinedOperation: return "UNDEFINED_OPERATION";
        case Errc::NoDelta: return "NO_DELTA";
        case Errc::InconsistentLog: return "INCONSISTENT_LOG";
        case Errc::StepFailed: return "STEP_FAILED";
        case Errc::PreMismatch: return "PRE_MISMATCH";
        case Errc::InvalidInput: return "INVALID_INPUT";
        case Errc::PrincipalNotAbstractable: return "PRINCIPAL_NOT_ABSTRACTABLE";
        case Errc::UnboundVariable: return "UNBOUND_VARIABLE";
        case Errc::SortMismatch: return "SORT_MISMATCH";
        case Errc::Io: return "IO";
    }
    return "UNKNOWN_ENTITY";
}

std::optional<Errc> errc_from_name(const std::string& s) {
    for (Errc e : {Errc::UnknownEntity, Errc::InvalidState, Errc::PreconditionFailed,
                   Errc::UndefinedOperation, Errc::NoDelta, Errc::InconsistentLog,
                   Errc::StepFailed, Errc::PreMismatch, Errc::InvalidInput,
                   Errc::PrincipalNotAbstractable, Errc::UnboundVariable, Errc::SortMismatch,
                   Errc::Io}) {
        if (s == errc_name(e)) return e;
    }
    return std::nullopt;
}

}  // namespace stratos
