#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace sctop {

/// Invalid order, size mismatch, out-of-range parameter.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The coupling diffeomorphism I_f failed min I'_f > 0 on the grid.
class NonInvertibleCoupling : public std::runtime_error {
 public:
  NonInvertibleCoupling(const std::string& what, double min_derivative)
      : std::runtime_error(what), min_derivative_(min_derivative) {}
  double min_derivative() const noexcept { return min_derivative_; }

 private:
  double min_derivative_;
};

/// An iterative procedure stopped without meeting its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, std::size_t iteration, double residual)
      : std::runtime_error(what), iteration_(iteration), residual_(residual) {}
  std::size_t iteration() const noexcept { return iteration_; }
  double residual() const noexcept { return residual_; }

 private:
  std::size_t iteration_;
  double residual_;
};

/// The Newton block (I - D) is singular or too ill-conditioned to trust.
class SingularSystem : public std::runtime_error {
 public:
  SingularSystem(const std::string& what, std::size_t iteration, double condition)
      : std::runtime_error(what), iteration_(iteration), condition_(condition) {}
  std::size_t iteration() const noexcept { return iteration_; }
  double condition() const noexcept { return condition_; }

 private:
  std::size_t iteration_;
  double condition_;
};

/// Malformed experiment configuration. line() is 0 when the problem is not
/// tied to a line of the file (command-line overrides, missing file).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, std::string field, std::size_t line = 0)
      : std::runtime_error(what), field_(std::move(field)), line_(line) {}
  const std::string& field() const noexcept { return field_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string field_;
  std::size_t line_;
};

}  // namespace sctop
