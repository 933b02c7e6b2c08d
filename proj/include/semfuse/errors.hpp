#ifndef SEMFUSE_ERRORS_HPP
#define SEMFUSE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace semfuse {

/// Bad or inconsistent configuration / calibration input. CLI exit code 2.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed or mutually inconsistent data files. CLI exit code 3.
struct DataError : std::runtime_error {
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Covariance with genuinely negative directions, beyond jitter repair.
struct NotPsdError : std::runtime_error {
  explicit NotPsdError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Velocity stream lookup against an empty stream.
struct EmptyStreamError : std::runtime_error {
  explicit EmptyStreamError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Superpixel target count exceeding the pixel count.
struct InvalidKError : std::runtime_error {
  explicit InvalidKError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace semfuse

#endif
