#ifndef GRCERT_ERRORS_HPP
#define GRCERT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace grcert {

// Invalid configuration, file schema, or argument. Mapped to exit code 1 by the CLI.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A metric was requested that the available oracles cannot support.
struct UnsupportedMetricError : ConfigError {
  explicit UnsupportedMetricError(const std::string& what) : ConfigError(what) {}
};

// Failure while executing an otherwise valid run. Mapped to exit code 2 by the CLI.
struct PipelineError : std::runtime_error {
  explicit PipelineError(const std::string& what) : std::runtime_error(what) {}
};

// The calibration subset cannot support a regression fit.
struct CalibrationError : PipelineError {
  explicit CalibrationError(const std::string& what) : PipelineError(what) {}
};

}  // namespace grcert

#endif
