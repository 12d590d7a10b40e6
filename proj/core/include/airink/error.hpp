#pragma once

#include <stdexcept>
#include <string>

namespace airink {

/// Broad failure classes. The CLI maps these onto process exit codes.
enum class ErrorClass { config, data, numeric };

class Error : public std::runtime_error {
 public:
  Error(ErrorClass cls, std::string kind, const std::string& what);

  ErrorClass error_class() const noexcept { return cls_; }
  /// Short machine-readable kind, e.g. "ParseError".
  const std::string& kind() const noexcept { return kind_; }

 private:
  ErrorClass cls_;
  std::string kind_;
};

#define AIRINK_DECLARE_ERROR(Name, Class)                               \
  class Name : public Error {                                            \
   public:                                                               \
    explicit Name(const std::string& what)                               \
        : Error(ErrorClass::Class, #Name, what) {}                       \
  }

AIRINK_DECLARE_ERROR(ConfigError, config);

AIRINK_DECLARE_ERROR(ParseError, data);
AIRINK_DECLARE_ERROR(IoError, data);
AIRINK_DECLARE_ERROR(EmptySegment, data);
AIRINK_DECLARE_ERROR(TooShort, data);
AIRINK_DECLARE_ERROR(DegenerateSplit, data);
AIRINK_DECLARE_ERROR(InsufficientSubjects, data);
AIRINK_DECLARE_ERROR(LabelError, data);
AIRINK_DECLARE_ERROR(EmptyReport, data);
AIRINK_DECLARE_ERROR(StageError, data);
AIRINK_DECLARE_ERROR(InvalidArgument, data);

AIRINK_DECLARE_ERROR(ShapeError, numeric);
AIRINK_DECLARE_ERROR(InvalidShape, numeric);
AIRINK_DECLARE_ERROR(NumericalError, numeric);
AIRINK_DECLARE_ERROR(DivergedTraining, numeric);
AIRINK_DECLARE_ERROR(ScreeningStarvation, numeric);

#undef AIRINK_DECLARE_ERROR

}  // namespace airink
