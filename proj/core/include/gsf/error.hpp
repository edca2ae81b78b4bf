#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace gsf {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed construction arguments (dimension mismatch, bad weights, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A covariance that must be positive definite is singular or indefinite.
class DegenerateCovariance : public Error {
public:
    using Error::Error;
};

/// The innovation covariance S of a Kalman update could not be inverted.
/// When raised from inside a filter bank, carries the offending model pair.
class DegenerateInnovation : public Error {
public:
    explicit DegenerateInnovation(const std::string& what) : Error(what) {}
    DegenerateInnovation(const std::string& what, std::size_t process_cluster,
                         std::size_t measurement_cluster)
        : Error(what + " (model i=" + std::to_string(process_cluster) +
                ", j=" + std::to_string(measurement_cluster) + ")"),
          process_cluster_(process_cluster),
          measurement_cluster_(measurement_cluster) {}

    [[nodiscard]] std::optional<std::size_t> process_cluster() const { return process_cluster_; }
    [[nodiscard]] std::optional<std::size_t> measurement_cluster() const {
        return measurement_cluster_;
    }

private:
    std::optional<std::size_t> process_cluster_;
    std::optional<std::size_t> measurement_cluster_;
};

/// An iterative procedure (Riccati iteration, bisection) did not converge.
class NoConvergence : public Error {
public:
    using Error::Error;
};

/// The Matched oracle was asked to run without ground-truth cluster labels.
class MissingTruth : public Error {
public:
    using Error::Error;
};

/// A gain-driven initial estimator was used without a gain schedule, or
/// past the end of a preloaded schedule.
class MissingGains : public Error {
public:
    using Error::Error;
};

/// A file did not follow its documented schema.
class SchemaError : public Error {
public:
    SchemaError(const std::string& what, std::size_t line)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    [[nodiscard]] std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

}  // namespace gsf
