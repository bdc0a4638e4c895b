#pragma once

#include <stdexcept>
#include <string>

namespace vgrt {

enum class ErrorCode {
    InvalidArgument,
    DegenerateGeometry,
    OriginOutsideRegion,
    NoIntersection,
    DegenerateConfiguration,
    GeneratorOutsideParent,
    EmptyCell,
    RootHasNoParent,
    PointOutsideDomain,
    EmptyQuadrature,
    ZeroField,
    Io,
};

inline const char* to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DegenerateGeometry: return "DegenerateGeometry";
    case ErrorCode::OriginOutsideRegion: return "OriginOutsideRegion";
    case ErrorCode::NoIntersection: return "NoIntersection";
    case ErrorCode::DegenerateConfiguration: return "DegenerateConfiguration";
    case ErrorCode::GeneratorOutsideParent: return "GeneratorOutsideParent";
    case ErrorCode::EmptyCell: return "EmptyCell";
    case ErrorCode::RootHasNoParent: return "RootHasNoParent";
    case ErrorCode::PointOutsideDomain: return "PointOutsideDomain";
    case ErrorCode::EmptyQuadrature: return "EmptyQuadrature";
    case ErrorCode::ZeroField: return "ZeroField";
    case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

/// Single exception type for the library; callers dispatch on code().
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace vgrt
