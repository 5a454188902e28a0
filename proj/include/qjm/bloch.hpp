#pragma once

// Bloch-vector primitives for unbiased two-outcome qubit measurements
// M_± = (I ± m·σ)/2 and qubit states ρ = (I + r·σ)/2.

#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qjm {

/// Norm slack admitted for |m| ≤ 1 and |r| ≤ 1. Inputs are never renormalized.
inline constexpr double kValidationTol = 1e-12;

struct Vec3 {
  double x{0.0};
  double y{0.0};
  double z{0.0};

  constexpr Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  constexpr Vec3& operator-=(const Vec3& o) {
    x -= o.x;
    y -= o.y;
    z -= o.z;
    return *this;
  }
  constexpr Vec3& operator*=(double s) {
    x *= s;
    y *= s;
    z *= s;
    return *this;
  }

  friend constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
  friend constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
  friend constexpr Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
  friend constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
  friend constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
  friend constexpr Vec3 operator/(const Vec3& a, double s) { return {a.x / s, a.y / s, a.z / s}; }
  friend constexpr bool operator==(const Vec3&, const Vec3&) = default;

  [[nodiscard]] constexpr double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  [[nodiscard]] constexpr double norm2() const { return dot(*this); }
  [[nodiscard]] double norm() const { return std::hypot(x, y, z); }
  [[nodiscard]] bool is_finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
  }
};

inline double distance(const Vec3& a, const Vec3& b) { return (a - b).norm(); }

/// Thrown when a Bloch vector is non-finite or longer than 1 + kValidationTol.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when an operation receives a tuple of the wrong length.
class ArityMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An unbiased qubit measurement, identified with its Bloch vector.
struct Measurement {
  Vec3 bloch;
  friend bool operator==(const Measurement&, const Measurement&) = default;
};

struct QubitState {
  Vec3 r;
};

/// Ordered list of measurements under joint analysis. Holds whatever it is
/// given; use validate() or require_valid() before trusting it.
class MeasurementTuple {
 public:
  MeasurementTuple() = default;
  explicit MeasurementTuple(std::vector<Measurement> items) : items_(std::move(items)) {}
  MeasurementTuple(std::initializer_list<Vec3> blochs) {
    items_.reserve(blochs.size());
    for (const auto& b : blochs) items_.push_back({b});
  }

  [[nodiscard]] std::size_t arity() const { return items_.size(); }
  [[nodiscard]] const Measurement& operator[](std::size_t i) const { return items_[i]; }
  [[nodiscard]] const Vec3& bloch(std::size_t i) const { return items_[i].bloch; }
  [[nodiscard]] const std::vector<Measurement>& items() const { return items_; }
  [[nodiscard]] auto begin() const { return items_.begin(); }
  [[nodiscard]] auto end() const { return items_.end(); }

  /// Every Bloch vector multiplied by t.
  [[nodiscard]] MeasurementTuple scaled(double t) const;

  friend bool operator==(const MeasurementTuple&, const MeasurementTuple&) = default;

 private:
  std::vector<Measurement> items_;
};

struct ValidationResult {
  bool ok{true};
  std::optional<std::size_t> bad_index;
  std::string message;
};

struct OutcomeProbabilities {
  double plus{0.5};
  double minus{0.5};
};

[[nodiscard]] ValidationResult validate(const MeasurementTuple& t);

/// Throws InvalidInput carrying validate()'s message.
void require_valid(const MeasurementTuple& t);
void require_valid(const Measurement& m);
void require_valid(const QubitState& s);
void require_arity(const MeasurementTuple& t, std::size_t arity);

/// p_± = Tr(ρ M_±) = (1 ± r·m)/2.
[[nodiscard]] OutcomeProbabilities outcome_probabilities(const Measurement& m, const QubitState& s);

/// The four sign combinations of a triple, in order
///   m1+m2+m3,  m1-m2-m3,  m2-m1-m3,  m3-m1-m2.
/// They always sum to zero.
[[nodiscard]] std::array<Vec3, 4> derived_p_vectors(const MeasurementTuple& t);

}  // namespace qjm
