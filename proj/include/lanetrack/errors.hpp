// Error types shared across the lane tracking library.
// Every recoverable failure surfaces as one of these; callers that need to
// distinguish catch the concrete type, everyone else catches Error.

#pragma once

#include <stdexcept>
#include <string>

namespace lanetrack {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Geometry input that cannot form a valid primitive (too few points,
// collinear set, zero-area polygon, a=b=0 line).
class DegenerateInput : public Error {
public:
    using Error::Error;
};

// Malformed file contents (bad magic, dimensions, truncation).
class FormatError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

// Mask with no lane pixels where at least one was required.
class EmptyMask : public Error {
public:
    using Error::Error;
};

class EmptySequence : public Error {
public:
    using Error::Error;
};

class NoValidSamples : public Error {
public:
    using Error::Error;
};

// Metric denominator is zero (e.g. sensitivity with tp + fn = 0).
class UndefinedMetric : public Error {
public:
    using Error::Error;
};

// Prediction/truth frame sets do not line up.
class FrameMismatch : public Error {
public:
    using Error::Error;
};

class InvalidScenario : public Error {
public:
    using Error::Error;
};

}  // namespace lanetrack
