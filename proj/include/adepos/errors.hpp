#pragma once

#include <stdexcept>
#include <string>

namespace adepos {

// Base class for every error raised by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidDimension : Error {
    using Error::Error;
};
struct DimensionMismatch : Error {
    using Error::Error;
};
struct DegenerateWindow : Error {
    using Error::Error;
};
struct EmptyTrainingSet : Error {
    using Error::Error;
};
struct NonFiniteValue : Error {
    using Error::Error;
};
struct AccumulatorOverflow : Error {
    using Error::Error;
};
struct InsufficientData : Error {
    using Error::Error;
};
struct ZeroTrainingNoise : Error {
    using Error::Error;
};
struct EmptyGroup : Error {
    using Error::Error;
};
struct EvenOrEmptyPanel : Error {
    using Error::Error;
};
struct InvalidEfficiency : Error {
    using Error::Error;
};
struct InvalidParams : Error {
    using Error::Error;
};
struct NonPositiveDenominator : Error {
    using Error::Error;
};
struct InvalidCircuitParams : Error {
    using Error::Error;
};
struct MappingError : Error {
    using Error::Error;
};
struct MissingColumn : Error {
    using Error::Error;
};
struct InvalidSpec : Error {
    using Error::Error;
};
struct IoError : Error {
    using Error::Error;
};

// Parse failures always carry the offending file and line.
struct ParseError : Error {
    ParseError(const std::string& path, std::size_t line, const std::string& what)
        : Error(path + ":" + std::to_string(line) + ": " + what), file(path), line_number(line) {}
    std::string file;
    std::size_t line_number;
};

struct ShapeError : Error {
    using Error::Error;
};

} // namespace adepos
