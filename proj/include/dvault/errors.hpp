#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dvault {

/// Base class for every error the library raises. what() is always
/// "<Name>: <detail>" so callers can surface the failing condition verbatim.
class Error : public std::runtime_error {
 public:
  Error(std::string_view name, std::string_view detail)
      : std::runtime_error(std::string(name) + ": " + std::string(detail)),
        name_(name) {}

  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

#define DVAULT_ERROR_TYPE(Name)                                   \
  class Name : public Error {                                     \
   public:                                                        \
    explicit Name(std::string_view detail) : Error(#Name, detail) {} \
  }

DVAULT_ERROR_TYPE(InvalidArgument);
DVAULT_ERROR_TYPE(DimensionMismatch);
DVAULT_ERROR_TYPE(IoError);

// keystore / registry
DVAULT_ERROR_TYPE(EmptyKey);
DVAULT_ERROR_TYPE(QuadrupleAbsent);
DVAULT_ERROR_TYPE(NoConstrainedPosition);
DVAULT_ERROR_TYPE(UnknownKey);
DVAULT_ERROR_TYPE(RegistryError);

// scramble
DVAULT_ERROR_TYPE(OrderNotDoublyEven);

// cipher
DVAULT_ERROR_TYPE(PointerOverflow);
DVAULT_ERROR_TYPE(ChecksumMismatch);
DVAULT_ERROR_TYPE(MalformedContainer);
DVAULT_ERROR_TYPE(NotEmbedded);

// multicloud
DVAULT_ERROR_TYPE(ConfigError);
DVAULT_ERROR_TYPE(NotFound);
DVAULT_ERROR_TYPE(Unavailable);
DVAULT_ERROR_TYPE(AllBackendsFailed);
DVAULT_ERROR_TYPE(AllReplicasUnavailable);
DVAULT_ERROR_TYPE(IntegrityFailure);

// analysis
DVAULT_ERROR_TYPE(DegenerateVariance);
DVAULT_ERROR_TYPE(EmptyHistogram);

#undef DVAULT_ERROR_TYPE

}  // namespace dvault
