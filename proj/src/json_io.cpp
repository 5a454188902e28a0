#include "qjm/json_io.hpp"

#include <cmath>

namespace qjm {

json InputError::to_json() const {
  static constexpr const char* kNames[] = {"parse", "schema", "invariant"};
  json j{{"error", {{"kind", kNames[static_cast<int>(kind_)]}, {"message", what()}}}};
  if (index_) j["error"]["index"] = *index_;
  return j;
}

MeasurementTuple parse_tuple(const json& doc, const char* key) {
  using K = InputError::Kind;
  if (!doc.is_object()) throw InputError(K::schema, "expected a JSON object");
  const auto it = doc.find(key);
  if (it == doc.end()) throw InputError(K::schema, std::string("missing \"") + key + "\" array");
  if (!it->is_array()) throw InputError(K::schema, std::string("\"") + key + "\" must be an array");

  std::vector<Measurement> items;
  for (std::size_t i = 0; i < it->size(); ++i) {
    const json& v = (*it)[i];
    if (!v.is_array() || v.size() != 3) {
      throw InputError(K::schema, "entry " + std::to_string(i) + " must be an array of 3 numbers", i);
    }
    std::array<double, 3> c{};
    for (std::size_t k = 0; k < 3; ++k) {
      if (!v[k].is_number()) {
        throw InputError(K::schema, "entry " + std::to_string(i) + " has a non-numeric component", i);
      }
      c[k] = v[k].get<double>();
    }
    items.push_back({{c[0], c[1], c[2]}});
  }
  MeasurementTuple t(std::move(items));
  if (auto v = validate(t); !v.ok) throw InputError(K::invariant, v.message, v.bad_index);
  return t;
}

MeasurementTuple parse_tuple_text(const std::string& text, const char* key) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(InputError::Kind::parse, e.what());
  }
  return parse_tuple(doc, key);
}

json tuple_to_json(const MeasurementTuple& t) {
  json arr = json::array();
  for (const auto& m : t) arr.push_back(m.bloch);
  return json{{"measurements", arr}};
}

void to_json(json& j, const Vec3& v) { j = json::array({v.x, v.y, v.z}); }

void from_json(const json& j, Vec3& v) {
  if (!j.is_array() || j.size() != 3) throw json::type_error::create(302, "Vec3 must be [x,y,z]", &j);
  v = {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

void to_json(json& j, const FTResult& r) {
  j = json{{"point", r.point},
           {"total_distance", r.total_distance},
           {"iterations", r.iterations},
           {"stationarity_residual", r.stationarity_residual},
           {"converged", r.converged},
           {"at_vertex", r.at_vertex}};
}

void from_json(const json& j, FTResult& r) {
  r.point = j.at("point").get<Vec3>();
  r.total_distance = j.at("total_distance").get<double>();
  r.iterations = j.at("iterations").get<std::size_t>();
  r.stationarity_residual = j.at("stationarity_residual").get<double>();
  r.converged = j.at("converged").get<bool>();
  r.at_vertex = j.at("at_vertex").get<bool>();
}

void to_json(json& j, const ParentPovmCertificate& c) {
  j = json{{"arity", c.params.arity},
           {"a", c.params.a},
           {"z", c.params.z},
           {"violation", c.violation},
           {"min_cone_excess", c.min_cone_excess},
           {"newton_steps", c.newton_steps}};
}

void from_json(const json& j, ParentPovmCertificate& c) {
  c.params.arity = j.at("arity").get<std::size_t>();
  c.params.a = j.at("a").get<std::vector<double>>();
  c.params.z = j.at("z").get<std::vector<Vec3>>();
  c.violation = j.at("violation").get<double>();
  c.min_cone_excess = j.at("min_cone_excess").get<double>();
  c.newton_steps = j.at("newton_steps").get<std::size_t>();
}

void to_json(json& j, const CompatReport& r) {
  j = json{{"criterion", std::string(to_string(r.criterion))},
           {"verdict", std::string(to_string(r.verdict))},
           {"margin", r.margin}};
  if (const auto* ft = std::get_if<FTResult>(&r.certificate)) {
    j["certificate"] = json{{"fermat_torricelli", *ft}};
  } else if (const auto* pc = std::get_if<ParentPovmCertificate>(&r.certificate)) {
    j["certificate"] = json{{"parent_povm", *pc}};
  } else {
    j["certificate"] = json::object();
  }
}

void from_json(const json& j, CompatReport& r) {
  const auto c = criterion_from_string(j.at("criterion").get<std::string>());
  const auto v = verdict_from_string(j.at("verdict").get<std::string>());
  if (!c || !v) throw json::other_error::create(501, "unknown criterion or verdict", &j);
  r.criterion = *c;
  r.verdict = *v;
  r.margin = j.at("margin").get<double>();
  r.certificate = std::monostate{};
  const json& cert = j.at("certificate");
  if (cert.contains("fermat_torricelli")) {
    r.certificate = cert.at("fermat_torricelli").get<FTResult>();
  } else if (cert.contains("parent_povm")) {
    r.certificate = cert.at("parent_povm").get<ParentPovmCertificate>();
  }
}

void to_json(json& j, const DeltaReport& r) {
  j = json{{"delta", r.delta},
           {"g_vectors", r.g_vectors},
           {"witness_r", r.witness_r},
           {"per_measurement_d", r.per_measurement_d}};
}

void from_json(const json& j, DeltaReport& r) {
  r.delta = j.at("delta").get<double>();
  r.g_vectors = j.at("g_vectors").get<std::vector<Vec3>>();
  r.witness_r = j.at("witness_r").get<Vec3>();
  r.per_measurement_d = j.at("per_measurement_d").get<std::vector<double>>();
}

void to_json(json& j, const BoundReport& r) {
  j = json{{"kind", std::string(to_string(r.kind))},
           {"raw_margin", r.raw_margin},
           {"degree", r.degree},
           {"heuristic", r.heuristic}};
}

void from_json(const json& j, BoundReport& r) {
  const auto k = bound_kind_from_string(j.at("kind").get<std::string>());
  if (!k) throw json::other_error::create(501, "unknown bound kind", &j);
  r.kind = *k;
  r.raw_margin = j.at("raw_margin").get<double>();
  r.degree = j.at("degree").get<double>();
  r.heuristic = j.at("heuristic").get<bool>();
}

void to_json(json& j, const DominanceResult& r) {
  j = json{{"l1", r.l1}, {"l2", r.l2}, {"holds", r.holds}, {"pairing_holds", r.pairing_holds}};
}

void from_json(const json& j, DominanceResult& r) {
  r.l1 = j.at("l1").get<double>();
  r.l2 = j.at("l2").get<double>();
  r.holds = j.at("holds").get<bool>();
  r.pairing_holds = j.at("pairing_holds").get<bool>();
}

void to_json(json& j, const OptimizeResult& r) {
  j = json{{"best_n", tuple_to_json(r.best_n).at("measurements")},
           {"achieved_delta", r.achieved_delta},
           {"lower_bound", r.lower_bound},
           {"gap", r.gap},
           {"feasibility_margin", r.feasibility_margin},
           {"starts", r.starts},
           {"converged", r.converged}};
}

void from_json(const json& j, OptimizeResult& r) {
  r.best_n = parse_tuple(json{{"measurements", j.at("best_n")}});
  r.achieved_delta = j.at("achieved_delta").get<double>();
  r.lower_bound = j.at("lower_bound").get<double>();
  r.gap = j.at("gap").get<double>();
  r.feasibility_margin = j.at("feasibility_margin").get<double>();
  r.starts = j.at("starts").get<std::size_t>();
  r.converged = j.at("converged").get<bool>();
}

void to_json(json& j, const OptimizerConfig& c) {
  j = json{{"seed", c.seed}, {"starts", c.starts}, {"max_evals", c.max_evals}};
}

void from_json(const json& j, OptimizerConfig& c) {
  c.seed = j.value("seed", c.seed);
  c.starts = j.value("starts", c.starts);
  c.max_evals = j.value("max_evals", c.max_evals);
}

}  // namespace qjm
