#include "radars/error.h"

namespace radars {

std::string_view ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kSpaceTooLarge: return "SpaceTooLarge";
    case ErrorKind::kEmptySet: return "EmptySet";
    case ErrorKind::kShapeMismatch: return "ShapeMismatch";
    case ErrorKind::kGraphNotRecorded: return "GraphNotRecorded";
    case ErrorKind::kMissingGrad: return "MissingGrad";
    case ErrorKind::kTruncatedRecord: return "TruncatedRecord";
    case ErrorKind::kLabelOutOfRange: return "LabelOutOfRange";
    case ErrorKind::kNonFiniteReward: return "NonFiniteReward";
    case ErrorKind::kEmptyPool: return "EmptyPool";
    case ErrorKind::kBudgetTooSmall: return "BudgetTooSmall";
    case ErrorKind::kNoSearchPerformed: return "NoSearchPerformed";
    case ErrorKind::kConfig: return "ConfigError";
    case ErrorKind::kIo: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(ErrorKindName(kind)) + ": " + what), kind_(kind) {}

void Fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace radars
