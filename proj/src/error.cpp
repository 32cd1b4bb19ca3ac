#include "qlocc/error.hpp"

namespace qlocc {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::Syntax: return "E_SYNTAX";
    case ErrorCode::Dimension: return "E_DIM";
    case ErrorCode::Split: return "E_SPLIT";
    case ErrorCode::EmptyState: return "E_EMPTY_STATE";
    case ErrorCode::DuplicateLabel: return "E_DUP_LABEL";
    case ErrorCode::InvalidArgument: return "E_INVALID_ARGUMENT";
    case ErrorCode::NonFinite: return "E_NON_FINITE";
    case ErrorCode::NotHermitian: return "E_NOT_HERMITIAN";
    case ErrorCode::NotOrthogonal: return "E_NOT_ORTHOGONAL";
    case ErrorCode::NotProduct: return "E_NOT_PRODUCT";
    case ErrorCode::NotOplm: return "E_NOT_OPLM";
    case ErrorCode::Noncommuting: return "E_NONCOMMUTING";
    case ErrorCode::TooLarge: return "E_TOO_LARGE";
    case ErrorCode::Convergence: return "E_CONVERGENCE";
    case ErrorCode::MalformedTree: return "E_MALFORMED_TREE";
    case ErrorCode::NonContiguous: return "E_NON_CONTIGUOUS";
    case ErrorCode::UnknownName: return "E_UNKNOWN_NAME";
  }
  return "E_UNKNOWN";
}

}  // namespace qlocc
