#include "minos/error.hpp"

namespace minos {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InsufficientData: return "InsufficientData";
        case ErrorCode::CounterRegression: return "CounterRegression";
        case ErrorCode::InvalidParameter: return "InvalidParameter";
        case ErrorCode::NoActivity: return "NoActivity";
        case ErrorCode::InvalidRecord: return "InvalidRecord";
        case ErrorCode::IncompatibleVectors: return "IncompatibleVectors";
        case ErrorCode::ZeroVector: return "ZeroVector";
        case ErrorCode::Conflict: return "Conflict";
        case ErrorCode::AmbiguousSelection: return "AmbiguousSelection";
        case ErrorCode::NoFeasibleCap: return "NoFeasibleCap";
        case ErrorCode::InvalidSpec: return "InvalidSpec";
        case ErrorCode::NotFound: return "NotFound";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::SchemaVersion: return "SchemaVersion";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

}  // namespace minos
