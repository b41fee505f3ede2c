#include "isoperc/error.hpp"

namespace isoperc {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::EmptyWindow: return "EmptyWindow";
    case ErrorKind::InvalidAngle: return "InvalidAngle";
    case ErrorKind::InvalidDirections: return "InvalidDirections";
    case ErrorKind::DegenerateOffsets: return "DegenerateOffsets";
    case ErrorKind::Validation: return "ValidationError";
    case ErrorKind::NotFlippable: return "NotFlippable";
    case ErrorKind::InvalidParameter: return "InvalidParameter";
    case ErrorKind::UnsupportedParameter: return "UnsupportedParameter";
    case ErrorKind::NotSolvable: return "NotSolvable";
    case ErrorKind::WrongModel: return "WrongModel";
    case ErrorKind::Shape: return "ShapeError";
    case ErrorKind::Geometry: return "GeometryError";
    case ErrorKind::Size: return "SizeError";
    case ErrorKind::OutOfRegime: return "OutOfRegime";
    case ErrorKind::Domain: return "DomainError";
    case ErrorKind::MissingSource: return "MissingSource";
    case ErrorKind::Format: return "FormatError";
    }
    return "Error";
}

} // namespace isoperc
