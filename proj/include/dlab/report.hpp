#pragma once

#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace dlab {

inline constexpr int kSchemaVersion = 1;

/// Outcome of a structural check, table reproduction or consistency
/// diagnostic. Failures are reported here rather than thrown.
struct DiagnosticsReport {
  std::string kind;
  bool passed = true;
  double tolerance = 0.0;
  std::vector<std::string> failures;
  std::vector<std::string> warnings;
  std::map<std::string, double> values;
  std::map<std::string, std::string> labels;

  void fail(std::string message) {
    passed = false;
    failures.push_back(std::move(message));
  }
};

enum class SignClass { diffusive, antidiffusive, mixed };

std::string to_string(SignClass c);

struct SignWitness {
  double at = 0.0;
  double derivative = 0.0;
  int sign = 0;  // -1, 0, +1
};

/// Consecutive grid nodes whose values violate the required monotonicity.
struct ViolatingPair {
  double from = 0.0;
  double to = 0.0;
  double value_from = 0.0;
  double value_to = 0.0;
};

struct SignReport {
  std::string kind;  // "kdv" | "nls"
  double beta = 0.0;
  SignClass classification = SignClass::mixed;
  std::vector<SignWitness> witness_points;
  std::vector<ViolatingPair> violating_pairs;
  double tolerance = 0.0;
  std::vector<std::string> notes;
};

nlohmann::ordered_json to_json(const DiagnosticsReport& r);
nlohmann::ordered_json to_json(const SignReport& r);

}  // namespace dlab
