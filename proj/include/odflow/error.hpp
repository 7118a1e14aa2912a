#pragma once

#include <stdexcept>
#include <string>

namespace odflow {

/// Library error. The message is prefixed with the module that raised it,
/// e.g. "stats: insufficient observations".
class Error : public std::runtime_error {
public:
    Error(std::string module, const std::string& message);

    const std::string& module() const noexcept { return module_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    std::string module_;
    std::string detail_;
};

} // namespace odflow
