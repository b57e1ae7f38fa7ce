#include "softqos/error.hpp"

namespace softqos {

ValidationError::ValidationError(std::vector<std::string> diagnostics)
    : std::runtime_error(diagnostics.empty() ? std::string("validation failed")
                                             : diagnostics.front()),
      diagnostics_(std::move(diagnostics)) {}

ValidationError::ValidationError(std::string diagnostic)
    : ValidationError(std::vector<std::string>{std::move(diagnostic)}) {}

}  // namespace softqos
