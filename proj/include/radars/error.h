#ifndef RADARS_ERROR_H_
#define RADARS_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace radars {

enum class ErrorKind {
  kInvalidArgument,
  kSpaceTooLarge,
  kEmptySet,
  kShapeMismatch,
  kGraphNotRecorded,
  kMissingGrad,
  kTruncatedRecord,
  kLabelOutOfRange,
  kNonFiniteReward,
  kEmptyPool,
  kBudgetTooSmall,
  kNoSearchPerformed,
  kConfig,
  kIo,
};

std::string_view ErrorKindName(ErrorKind kind);

/// Every failure raised by the library carries one of the kinds above so that
/// callers (the CLI in particular) can map it to a stable exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void Fail(ErrorKind kind, const std::string& what);

inline void Check(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) Fail(kind, what);
}

}  // namespace radars

#endif  // RADARS_ERROR_H_
