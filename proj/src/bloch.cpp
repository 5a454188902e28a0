#include "qjm/bloch.hpp"

#include <sstream>

namespace qjm {

namespace {

bool within_unit_ball(const Vec3& v) { return v.is_finite() && v.norm() <= 1.0 + kValidationTol; }

}  // namespace

MeasurementTuple MeasurementTuple::scaled(double t) const {
  std::vector<Measurement> out;
  out.reserve(items_.size());
  for (const auto& m : items_) out.push_back({m.bloch * t});
  return MeasurementTuple(std::move(out));
}

ValidationResult validate(const MeasurementTuple& t) {
  for (std::size_t i = 0; i < t.arity(); ++i) {
    const Vec3& b = t.bloch(i);
    if (!b.is_finite()) {
      return {false, i, "measurement " + std::to_string(i) + " has a non-finite component"};
    }
    if (!within_unit_ball(b)) {
      std::ostringstream os;
      os.precision(17);
      os << "measurement " << i << " has Bloch norm " << b.norm() << " > 1";
      return {false, i, os.str()};
    }
  }
  return {};
}

void require_valid(const MeasurementTuple& t) {
  if (auto v = validate(t); !v.ok) throw InvalidInput(v.message);
}

void require_valid(const Measurement& m) {
  if (!within_unit_ball(m.bloch)) throw InvalidInput("measurement Bloch vector outside the unit ball");
}

void require_valid(const QubitState& s) {
  if (!within_unit_ball(s.r)) throw InvalidInput("state Bloch vector outside the unit ball");
}

void require_arity(const MeasurementTuple& t, std::size_t arity) {
  if (t.arity() != arity) {
    throw ArityMismatch("expected " + std::to_string(arity) + " measurements, got " +
                        std::to_string(t.arity()));
  }
}

OutcomeProbabilities outcome_probabilities(const Measurement& m, const QubitState& s) {
  require_valid(m);
  require_valid(s);
  const double c = s.r.dot(m.bloch);
  return {0.5 * (1.0 + c), 0.5 * (1.0 - c)};
}

std::array<Vec3, 4> derived_p_vectors(const MeasurementTuple& t) {
  require_arity(t, 3);
  const Vec3& a = t.bloch(0);
  const Vec3& b = t.bloch(1);
  const Vec3& c = t.bloch(2);
  return {a + b + c, a - b - c, b - a - c, c - a - b};
}

}  // namespace qjm
