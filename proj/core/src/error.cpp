#include "airink/error.hpp"

namespace airink {

Error::Error(ErrorClass cls, std::string kind, const std::string& what)
    : std::runtime_error(kind + ": " + what), cls_(cls), kind_(std::move(kind)) {}

}  // namespace airink
