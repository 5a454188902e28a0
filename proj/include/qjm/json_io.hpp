#pragma once

// JSON encodings of the library's data types.
//
// Measurement tuples use {"measurements": [[x, y, z], ...]}. Every report type
// has a to_json/from_json pair so that emitted reports parse back losslessly.

#include <optional>
#include <string>

#include "json.hpp"
#include "qjm/bloch.hpp"
#include "qjm/compat.hpp"
#include "qjm/geomedian.hpp"
#include "qjm/metrics.hpp"
#include "qjm/optimizer.hpp"

namespace qjm {

using json = nlohmann::json;

/// Malformed or invalid input document. `index` names the offending
/// measurement when the problem is a single vector.
class InputError : public InvalidInput {
 public:
  enum class Kind { parse, schema, invariant };
  InputError(Kind kind, std::string message, std::optional<std::size_t> index = std::nullopt)
      : InvalidInput(message), kind_(kind), index_(index) {}

  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] std::optional<std::size_t> index() const { return index_; }
  [[nodiscard]] json to_json() const;

 private:
  Kind kind_;
  std::optional<std::size_t> index_;
};

/// Parses and validates a tuple document. Throws InputError.
[[nodiscard]] MeasurementTuple parse_tuple(const json& doc, const char* key = "measurements");
[[nodiscard]] MeasurementTuple parse_tuple_text(const std::string& text, const char* key = "measurements");
[[nodiscard]] json tuple_to_json(const MeasurementTuple& t);

void to_json(json& j, const Vec3& v);
void from_json(const json& j, Vec3& v);

void to_json(json& j, const FTResult& r);
void from_json(const json& j, FTResult& r);

void to_json(json& j, const ParentPovmCertificate& c);
void from_json(const json& j, ParentPovmCertificate& c);

void to_json(json& j, const CompatReport& r);
void from_json(const json& j, CompatReport& r);

void to_json(json& j, const DeltaReport& r);
void from_json(const json& j, DeltaReport& r);

void to_json(json& j, const BoundReport& r);
void from_json(const json& j, BoundReport& r);

void to_json(json& j, const DominanceResult& r);
void from_json(const json& j, DominanceResult& r);

void to_json(json& j, const OptimizeResult& r);
void from_json(const json& j, OptimizeResult& r);

void to_json(json& j, const OptimizerConfig& c);
void from_json(const json& j, OptimizerConfig& c);

}  // namespace qjm
