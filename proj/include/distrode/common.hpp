#pragma once

#include <complex>
#include <limits>
#include <stdexcept>
#include <string>

namespace distrode {

// All algebra scalars are complex; the beam front end restricts to reals.
using Scalar = std::complex<double>;

constexpr double kInf = std::numeric_limits<double>::infinity();

// Open or closed real interval; endpoints may be +/-infinity.
struct Interval {
  double lo = -kInf;
  double hi = kInf;

  bool contains(double x) const { return x > lo && x < hi; }
  bool contains_closed(double x) const { return x >= lo && x <= hi; }
  double length() const { return hi - lo; }
  static Interval whole() { return {-kInf, kInf}; }
};

struct ParseError : std::runtime_error {
  ParseError(const std::string& msg, std::size_t offset_)
      : std::runtime_error(msg + " at offset " + std::to_string(offset_)),
        offset(offset_) {}
  std::size_t offset;
};

struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct QuadratureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ValidationError : std::runtime_error {
  enum class Kind { SectionallySingular, DegenerateInterface, BadSpec };
  ValidationError(Kind k, const std::string& msg)
      : std::runtime_error(msg), kind(k) {}
  Kind kind;
};

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace distrode
