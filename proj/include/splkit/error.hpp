#pragma once

#include <stdexcept>
#include <string>

namespace splkit {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonPositiveDepth : Error {
    using Error::Error;
};

struct CornerBehindCamera : Error {
    using Error::Error;
};

struct UnmappedCategory : Error {
    using Error::Error;
};

struct UnknownCategory : Error {
    using Error::Error;
};

struct DegenerateBox : Error {
    using Error::Error;
};

struct NonDifferentiablePoint : Error {
    using Error::Error;
};

struct PlacementExhausted : Error {
    using Error::Error;
};

struct SchemaMismatch : Error {
    using Error::Error;
};

struct MalformedRecord : Error {
    using Error::Error;
};

struct MissingRaster : Error {
    using Error::Error;
};

}  // namespace splkit
