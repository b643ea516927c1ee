#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>

namespace hourglass {

/// Default comparison tolerance for metric quantities in floating mode.
inline constexpr double kDefaultTolerance = 1e-9;

/// Error codes shared across the library. Thrown wrapped in SurfaceError.
enum class ErrorCode {
  EdgeLengthMismatch,
  UnmatchedEdge,
  NonSimplePolygon,
  OrientationError,
  BadParams,
  GlobalSquare,
  FlipLimitExceeded,
  BoundTooLarge,
  SearchBudgetExceeded,
  DegenerateCore,
  DisjointnessViolated,
  BudgetExceeded,
  SolverFailure,
  InvolutionMismatch,
  QuadratureUnstable,
  GramIllConditioned,
  IllConditionedFit,
  FloorViolated,
  PartitionInvalid,
  DiskNotEmbedded,
  NoPathFound,
  OrthogonalizationFailed,
  FormatError,
};

const char* error_code_name(ErrorCode code);

class SurfaceError : public std::runtime_error {
 public:
  SurfaceError(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
        code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw SurfaceError(code, what);
}

/// Exact rational with 64-bit numerator/denominator, used for validation
/// and combinatorics in rational mode. Overflows throw.
class Rational {
 public:
  Rational() : num_(0), den_(1) {}
  Rational(std::int64_t n) : num_(n), den_(1) {}
  Rational(std::int64_t n, std::int64_t d) : num_(n), den_(d) { normalize(); }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  double to_double() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  Rational operator+(const Rational& o) const {
    return Rational(checked_add(checked_mul(num_, o.den_), checked_mul(o.num_, den_)),
                    checked_mul(den_, o.den_));
  }
  Rational operator-(const Rational& o) const {
    return Rational(checked_sub(checked_mul(num_, o.den_), checked_mul(o.num_, den_)),
                    checked_mul(den_, o.den_));
  }
  Rational operator*(const Rational& o) const {
    return Rational(checked_mul(num_, o.num_), checked_mul(den_, o.den_));
  }
  Rational operator-() const { return Rational(-num_, den_); }

  bool operator==(const Rational& o) const {
    return num_ == o.num_ && den_ == o.den_;
  }
  bool operator!=(const Rational& o) const { return !(*this == o); }
  bool operator<(const Rational& o) const {
    return checked_mul(num_, o.den_) < checked_mul(o.num_, den_);
  }

  /// Parses "p/q" or a finite decimal like "-1.25" exactly.
  static std::optional<Rational> parse(const std::string& text);

 private:
  void normalize() {
    if (den_ == 0) fail(ErrorCode::BadParams, "rational with zero denominator");
    if (den_ < 0) { num_ = -num_; den_ = -den_; }
    std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) { num_ /= g; den_ /= g; }
  }
  static std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_mul_overflow(a, b, &r))
      fail(ErrorCode::BadParams, "rational overflow");
    return r;
  }
  static std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_add_overflow(a, b, &r))
      fail(ErrorCode::BadParams, "rational overflow");
    return r;
  }
  static std::int64_t checked_sub(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_sub_overflow(a, b, &r))
      fail(ErrorCode::BadParams, "rational overflow");
    return r;
  }

  std::int64_t num_;
  std::int64_t den_;
};

/// 2D vector in a flat chart.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator-() const { return {-x, -y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double cross(const Vec2& o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
  double squared_norm() const { return x * x + y * y; }
  Vec2 perp() const { return {-y, x}; }  // rotate by +90 degrees
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

inline bool nearly_equal(double a, double b, double tol = kDefaultTolerance) {
  return std::fabs(a - b) <= tol * std::max(1.0, std::max(std::fabs(a), std::fabs(b)));
}

}  // namespace hourglass
