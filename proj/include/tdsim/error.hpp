#pragma once

#include <stdexcept>
#include <string>

namespace tdsim {

// Invalid argument values (bad bounds, out-of-range probabilities, ...).
struct ParamError : std::invalid_argument {
    explicit ParamError(const std::string& what) : std::invalid_argument(what) {}
};

// Problems with input data: unreadable files, missing columns, empty inputs,
// or samples too small to support the requested computation.
struct DataError : std::runtime_error {
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace tdsim
