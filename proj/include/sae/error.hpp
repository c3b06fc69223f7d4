#pragma once

#include <stdexcept>
#include <string>

namespace sae {

// Every failure raised by the library derives from Error; kind() names the
// category so the CLI can map it onto an exit code.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define SAE_DEFINE_ERROR(Name, tag)                                   \
  class Name : public Error {                                         \
   public:                                                            \
    explicit Name(const std::string& what) : Error(tag, what) {}      \
  };

SAE_DEFINE_ERROR(ShapeError, "shape")
SAE_DEFINE_ERROR(FormatError, "format")
SAE_DEFINE_ERROR(IngestionError, "ingestion")
SAE_DEFINE_ERROR(SplitError, "split")
SAE_DEFINE_ERROR(ParameterError, "parameter")
SAE_DEFINE_ERROR(NumericError, "numeric")
SAE_DEFINE_ERROR(EvaluationError, "evaluation")
SAE_DEFINE_ERROR(IoError, "io")
SAE_DEFINE_ERROR(ConfigError, "config")

#undef SAE_DEFINE_ERROR

}  // namespace sae
