#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace effdyn {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed potential expression; offset is a byte index into the source text.
class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& what, std::size_t offset)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Invalid model parameters (e.g. a non positive definite quadratic form).
class ModelError : public Error {
 public:
  using Error::Error;
};

/// The requested computation is outside what the model supports
/// (non log-concave conditional, bath dimension too large, ...).
class UnsupportedModel : public Error {
 public:
  using Error::Error;
};

class QuadratureError : public Error {
 public:
  using Error::Error;
};

/// A trajectory left the confinement box; step is the offending step index.
class ExplosionError : public Error {
 public:
  ExplosionError(const std::string& what, long step)
      : Error(what + " at step " + std::to_string(step)), step_(step) {}
  long step() const noexcept { return step_; }

 private:
  long step_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace effdyn
