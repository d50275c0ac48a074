#include "guardkit/audit_report.hpp"

#include "json.hpp"

namespace guardkit::report {

void AuditReport::add(const std::string& check_name, const std::string& verdict,
                      provenance::DecisionReason reason, const std::string& detail) {
  provenance::TaxonomyLabel label = provenance::label_decision(reason);
  checks.push_back({check_name, verdict, provenance::decision_reason_name(reason),
                    label.surface, label.stage, detail});
}

std::string AuditReport::serialize() const {
  nlohmann::json doc;
  doc["tool_version"] = kToolVersion;
  doc["checks"] = nlohmann::json::array();
  for (const auto& c : checks) {
    nlohmann::json row;
    row["check_name"] = c.check_name;
    row["verdict"] = c.verdict;
    row["reason"] = c.reason;
    row["surface"] = c.surface;
    row["stage"] = c.stage;
    row["detail"] = c.detail;
    doc["checks"].push_back(row);
  }
  return doc.dump(2) + "\n";
}

}  // namespace guardkit::report
