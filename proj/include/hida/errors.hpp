#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hida {

/// Malformed input: a parameter outside its admissible range.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Exact integer arithmetic ran out of room.
class CapacityError : public std::overflow_error {
 public:
  CapacityError(const std::string& what, int max_safe_n)
      : std::overflow_error(what), max_safe_n_(max_safe_n) {}
  int max_safe_n() const noexcept { return max_safe_n_; }

 private:
  int max_safe_n_;
};

/// The Legendre objective has no bracketed minimum inside the search bounds.
class UnboundedBelowError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An L-function table is too short for the truncation rule to fire.
class InsufficientTableError : public std::runtime_error {
 public:
  InsufficientTableError(const std::string& what, double last_ratio, std::size_t n_max)
      : std::runtime_error(what), last_ratio_(last_ratio), n_max_(n_max) {}
  double last_ratio() const noexcept { return last_ratio_; }
  std::size_t n_max() const noexcept { return n_max_; }

 private:
  double last_ratio_;
  std::size_t n_max_;
};

/// The bidual maximiser sits on the t-cap boundary.
class CapTooSmallError : public std::runtime_error {
 public:
  CapTooSmallError(const std::string& what, double t_cap)
      : std::runtime_error(what), t_cap_(t_cap) {}
  double t_cap() const noexcept { return t_cap_; }

 private:
  double t_cap_;
};

/// |F(xi)| <= K u(a|xi|^2)^{1/2} failed at some radius.
class HypothesisViolatedError : public std::runtime_error {
 public:
  HypothesisViolatedError(const std::string& what, double radius, double log_margin)
      : std::runtime_error(what), radius_(radius), log_margin_(log_margin) {}
  double radius() const noexcept { return radius_; }
  double log_margin() const noexcept { return log_margin_; }

 private:
  double radius_;
  double log_margin_;
};

/// Manifest or configuration file does not match the schema.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hida
