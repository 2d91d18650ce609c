#pragma once

#include <stdexcept>
#include <string>

namespace qml {

// Shared error taxonomy. One class per precondition family; the CLI maps
// these to its exit-code contract.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidKey : Error {
    using Error::Error;
};
struct DimensionError : Error {
    using Error::Error;
};
struct InvalidState : Error {
    using Error::Error;
};
struct InvalidParameter : Error {
    using Error::Error;
};
struct InvalidDistribution : Error {
    using Error::Error;
};
struct NoSupport : Error {
    using Error::Error;
};
struct TooLarge : Error {
    using Error::Error;
};

} // namespace qml
