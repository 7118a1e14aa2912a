#include "odflow/error.hpp"

namespace odflow {

Error::Error(std::string module, const std::string& message)
    : std::runtime_error(module + ": " + message), module_(std::move(module)), detail_(message) {}

} // namespace odflow
