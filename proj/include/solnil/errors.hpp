#pragma once

#include <stdexcept>
#include <string>

namespace solnil {

// Base class for all toolkit errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A coordinate left the chart's admissible box |y^k| <= domain_bound.
struct DomainExceeded : Error {
    explicit DomainExceeded(const std::string& what) : Error(what) {}
};

// Metric not invertible at the evaluation point (condition number > 1e12).
struct SingularMetric : Error {
    explicit SingularMetric(const std::string& what) : Error(what) {}
};

struct NonOrthonormalFrame : Error {
    explicit NonOrthonormalFrame(const std::string& what) : Error(what) {}
};

struct GeodesicDegenerate : Error {
    explicit GeodesicDegenerate(const std::string& what) : Error(what) {}
};

struct InsufficientSamples : Error {
    explicit InsufficientSamples(const std::string& what) : Error(what) {}
};

struct WrongChart : Error {
    explicit WrongChart(const std::string& what) : Error(what) {}
};

struct StepTooLarge : Error {
    explicit StepTooLarge(const std::string& what) : Error(what) {}
};

// Config / map-file / expression syntax errors.
struct ParseError : Error {
    explicit ParseError(const std::string& what) : Error(what) {}
};

} // namespace solnil
