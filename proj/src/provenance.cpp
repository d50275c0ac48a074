#include "guardkit/provenance.hpp"

namespace guardkit::provenance {

namespace {

std::optional<ProvenanceKind> kind_from_string(const std::string& s) {
  if (s == "external_user") return ProvenanceKind::external_user;
  if (s == "inter_session") return ProvenanceKind::inter_session;
  if (s == "internal_system") return ProvenanceKind::internal_system;
  return std::nullopt;
}

std::optional<std::string> optional_string(const nlohmann::json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end() || !it->is_string()) return std::nullopt;
  return it->get<std::string>();
}

}  // namespace

const char* provenance_kind_name(ProvenanceKind k) {
  switch (k) {
    case ProvenanceKind::external_user: return "external_user";
    case ProvenanceKind::inter_session: return "inter_session";
    case ProvenanceKind::internal_system: return "internal_system";
  }
  return "?";
}

std::optional<InputProvenance> normalize_input_provenance(const nlohmann::json& candidate) {
  if (!candidate.is_object()) return std::nullopt;
  auto kind_it = candidate.find("kind");
  if (kind_it == candidate.end() || !kind_it->is_string()) return std::nullopt;
  auto kind = kind_from_string(kind_it->get<std::string>());
  if (!kind) return std::nullopt;

  InputProvenance p;
  p.kind = *kind;
  if (*kind != ProvenanceKind::external_user) {
    p.source_session_key = optional_string(candidate, "sourceSessionKey");
    p.source_channel = optional_string(candidate, "sourceChannel");
    p.source_tool = optional_string(candidate, "sourceTool");
  }
  return p;
}

std::vector<SessionMessage> sanitize_session_history(
    const std::vector<SessionMessage>& messages) {
  std::vector<SessionMessage> out;
  out.reserve(messages.size());
  for (const auto& m : messages) {
    SessionMessage copy = m;
    if (!copy.annotated && copy.provenance &&
        copy.provenance->kind == ProvenanceKind::inter_session) {
      copy.content = std::string(kInterSessionAnnotation) + copy.content;
      copy.annotated = true;
    }
    out.push_back(std::move(copy));
  }
  return out;
}

bool has_inter_session_user_provenance(const SessionMessage& message) {
  return message.role == Role::user && message.provenance &&
         message.provenance->kind == ProvenanceKind::inter_session;
}

TaxonomyLabel label_decision(DecisionReason reason) {
  switch (reason) {
    case DecisionReason::exec_analysis_failure:
    case DecisionReason::exec_denied_flag:
    case DecisionReason::exec_blocked_multiplexer:
    case DecisionReason::exec_expansion_present:
      return {"Exec Policy Engine", "Privilege Escalation"};
    case DecisionReason::exec_not_allowlisted:
    case DecisionReason::exec_approved:
    case DecisionReason::exec_allowlisted:
      return {"Exec Policy Engine", "Execution"};

    case DecisionReason::sandbox_blocked_bind:
    case DecisionReason::sandbox_ancestor_bind:
    case DecisionReason::sandbox_malformed_bind:
    case DecisionReason::sandbox_host_network:
    case DecisionReason::sandbox_unconfined_seccomp:
    case DecisionReason::sandbox_unconfined_apparmor:
      return {"Container Boundary", "Privilege Escalation"};
    case DecisionReason::sandbox_named_network:
      return {"Container Boundary", "Execution"};

    case DecisionReason::gateway_url_allowed:
    case DecisionReason::gateway_url_no_override:
    case DecisionReason::gateway_url_rejected:
      return {"Gateway WebSocket Interface", "Credential Access"};
    case DecisionReason::gateway_method_dispatchable:
      return {"Gateway WebSocket Interface", "Execution"};
    case DecisionReason::gateway_method_denied:
      return {"Gateway WebSocket Interface", "Privilege Escalation"};

    case DecisionReason::identity_wildcard_match:
    case DecisionReason::identity_id_match:
    case DecisionReason::identity_no_match:
      return {"Channel Input Interface", "Initial Access"};

    case DecisionReason::webhook_authentic:
    case DecisionReason::webhook_bad_signature:
    case DecisionReason::webhook_stale_timestamp:
    case DecisionReason::webhook_malformed_header:
      return {"Channel Input Interface", "Initial Access"};

    case DecisionReason::skill_manifest_intact:
    case DecisionReason::skill_manifest_mismatch:
    case DecisionReason::skill_high_entropy_blob:
    case DecisionReason::skill_raw_ip_url:
    case DecisionReason::skill_base64_command_block:
    case DecisionReason::skill_unreadable_file:
      return {"Plugin & Skill Distribution", "Initial Access"};
  }
  return {"Host OS Interface", "Impact"};  // unreachable for the closed enum
}

const char* decision_reason_name(DecisionReason reason) {
  switch (reason) {
    case DecisionReason::exec_analysis_failure: return "analysis_failure";
    case DecisionReason::exec_not_allowlisted: return "not_allowlisted";
    case DecisionReason::exec_denied_flag: return "denied_flag";
    case DecisionReason::exec_blocked_multiplexer: return "blocked_multiplexer";
    case DecisionReason::exec_expansion_present: return "expansion_present";
    case DecisionReason::exec_approved: return "approved";
    case DecisionReason::exec_allowlisted: return "allowlisted";
    case DecisionReason::sandbox_blocked_bind: return "blocked_bind";
    case DecisionReason::sandbox_ancestor_bind: return "ancestor_bind";
    case DecisionReason::sandbox_malformed_bind: return "malformed_bind";
    case DecisionReason::sandbox_host_network: return "host_network";
    case DecisionReason::sandbox_named_network: return "named_network";
    case DecisionReason::sandbox_unconfined_seccomp: return "unconfined_seccomp";
    case DecisionReason::sandbox_unconfined_apparmor: return "unconfined_apparmor";
    case DecisionReason::gateway_url_allowed: return "url_allowed";
    case DecisionReason::gateway_url_no_override: return "url_no_override";
    case DecisionReason::gateway_url_rejected: return "url_rejected";
    case DecisionReason::gateway_method_dispatchable: return "method_dispatchable";
    case DecisionReason::gateway_method_denied: return "method_denied";
    case DecisionReason::identity_wildcard_match: return "wildcard_match";
    case DecisionReason::identity_id_match: return "id_match";
    case DecisionReason::identity_no_match: return "no_match";
    case DecisionReason::webhook_authentic: return "authentic";
    case DecisionReason::webhook_bad_signature: return "bad_signature";
    case DecisionReason::webhook_stale_timestamp: return "stale_timestamp";
    case DecisionReason::webhook_malformed_header: return "malformed_header";
    case DecisionReason::skill_manifest_intact: return "manifest_intact";
    case DecisionReason::skill_manifest_mismatch: return "manifest_mismatch";
    case DecisionReason::skill_high_entropy_blob: return "high_entropy_blob";
    case DecisionReason::skill_raw_ip_url: return "raw_ip_url";
    case DecisionReason::skill_base64_command_block: return "base64_command_block";
    case DecisionReason::skill_unreadable_file: return "unreadable_file";
  }
  return "?";
}

const std::vector<DecisionReason>& all_decision_reasons() {
  static const std::vector<DecisionReason> kAll = {
      DecisionReason::exec_analysis_failure,
      DecisionReason::exec_not_allowlisted,
      DecisionReason::exec_denied_flag,
      DecisionReason::exec_blocked_multiplexer,
      DecisionReason::exec_expansion_present,
      DecisionReason::exec_approved,
      DecisionReason::exec_allowlisted,
      DecisionReason::sandbox_blocked_bind,
      DecisionReason::sandbox_ancestor_bind,
      DecisionReason::sandbox_malformed_bind,
      DecisionReason::sandbox_host_network,
      DecisionReason::sandbox_named_network,
      DecisionReason::sandbox_unconfined_seccomp,
      DecisionReason::sandbox_unconfined_apparmor,
      DecisionReason::gateway_url_allowed,
      DecisionReason::gateway_url_no_override,
      DecisionReason::gateway_url_rejected,
      DecisionReason::gateway_method_dispatchable,
      DecisionReason::gateway_method_denied,
      DecisionReason::identity_wildcard_match,
      DecisionReason::identity_id_match,
      DecisionReason::identity_no_match,
      DecisionReason::webhook_authentic,
      DecisionReason::webhook_bad_signature,
      DecisionReason::webhook_stale_timestamp,
      DecisionReason::webhook_malformed_header,
      DecisionReason::skill_manifest_intact,
      DecisionReason::skill_manifest_mismatch,
      DecisionReason::skill_high_entropy_blob,
      DecisionReason::skill_raw_ip_url,
      DecisionReason::skill_base64_command_block,
      DecisionReason::skill_unreadable_file,
  };
  return kAll;
}

}  // namespace guardkit::provenance
