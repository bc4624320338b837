#pragma once

#include <stdexcept>
#include <string>

namespace raci {

// Error categories mapped to CLI exit codes (config: 2, data: 3, numeric: 4).
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct data_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct numerical_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace raci
