#pragma once

#include <string>
#include <vector>

#include "guardkit/provenance.hpp"

namespace guardkit::report {

inline constexpr const char* kToolVersion = "0.1.0";

struct CheckRow {
  std::string check_name;
  std::string verdict;
  std::string reason;
  std::string surface;
  std::string stage;
  std::string detail;
};

// Machine-readable audit report. Serialization is deterministic: stable key
// order, checks in insertion order, no timestamps.
struct AuditReport {
  std::vector<CheckRow> checks;

  void add(const std::string& check_name, const std::string& verdict,
           provenance::DecisionReason reason, const std::string& detail);

  std::string serialize() const;  // JSON, trailing newline
};

}  // namespace guardkit::report
