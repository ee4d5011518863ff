#include "dlab/report.hpp"

namespace dlab {

std::string to_string(SignClass c) {
  switch (c) {
    case SignClass::diffusive:
      return "diffusive";
    case SignClass::antidiffusive:
      return "antidiffusive";
    case SignClass::mixed:
      return "mixed";
  }
  return "mixed";
}

nlohmann::ordered_json to_json(const DiagnosticsReport& r) {
  nlohmann::ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = r.kind;
  j["passed"] = r.passed;
  j["tolerance"] = r.tolerance;
  j["failures"] = r.failures;
  j["warnings"] = r.warnings;
  j["values"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.values) j["values"][k] = v;
  j["labels"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.labels) j["labels"][k] = v;
  return j;
}

nlohmann::ordered_json to_json(const SignReport& r) {
  nlohmann::ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = r.kind;
  j["beta"] = r.beta;
  j["classification"] = to_string(r.classification);
  j["tolerance"] = r.tolerance;
  auto& w = j["witness_points"] = nlohmann::ordered_json::array();
  for (const auto& p : r.witness_points) {
    w.push_back({{"at", p.at}, {"derivative", p.derivative}, {"sign", p.sign}});
  }
  auto& v = j["violating_pairs"] = nlohmann::ordered_json::array();
  for (const auto& p : r.violating_pairs) {
    v.push_back({{"from", p.from}, {"to", p.to}, {"value_from", p.value_from},
                 {"value_to", p.value_to}});
  }
  j["notes"] = r.notes;
  return j;
}

}  // namespace dlab
