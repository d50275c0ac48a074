#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace guardkit::provenance {

// ---------------------------------------------------------------------------
// Input provenance
// ---------------------------------------------------------------------------

enum class ProvenanceKind { external_user, inter_session, internal_system };

const char* provenance_kind_name(ProvenanceKind k);

struct InputProvenance {
  ProvenanceKind kind = ProvenanceKind::external_user;
  std::optional<std::string> source_session_key;
  std::optional<std::string> source_channel;
  std::optional<std::string> source_tool;
};

enum class Role { user, assistant };

struct SessionMessage {
  Role role = Role::user;
  std::string content;
  std::optional<InputProvenance> provenance;
  // In-memory marker set by sanitize_session_history; never persisted.
  // Keying on this flag (instead of sniffing the prefix) keeps user content
  // that legitimately begins with the annotation text intact.
  bool annotated = false;
};

// Frozen annotation prefix, trailing space included.
inline constexpr const char* kInterSessionAnnotation = "[Inter-session message] ";

// Accepts a loosely-typed provenance document only when its kind string-equals
// one of the three closed enum values; everything else is treated as
// unprovenanced external input.
std::optional<InputProvenance> normalize_input_provenance(const nlohmann::json& candidate);

// Returns a new list in which inter-session turns carry the annotation prefix.
// Purely in-memory; the input list and persisted originals are untouched, and
// repeated sanitization never double-prefixes.
std::vector<SessionMessage> sanitize_session_history(
    const std::vector<SessionMessage>& messages);

// Guard used when building memory context: true iff role=user and
// provenance.kind=inter_session.
bool has_inter_session_user_provenance(const SessionMessage& message);

// ---------------------------------------------------------------------------
// Taxonomy labeling
// ---------------------------------------------------------------------------

// Closed set of machine-readable reasons produced anywhere in this library.
enum class DecisionReason {
  // exec pipeline
  exec_analysis_failure,
  exec_not_allowlisted,
  exec_denied_flag,
  exec_blocked_multiplexer,
  exec_expansion_present,
  exec_approved,
  exec_allowlisted,
  // sandbox validation
  sandbox_blocked_bind,
  sandbox_ancestor_bind,
  sandbox_malformed_bind,
  sandbox_host_network,
  sandbox_named_network,
  sandbox_unconfined_seccomp,
  sandbox_unconfined_apparmor,
  // gateway
  gateway_url_allowed,
  gateway_url_no_override,
  gateway_url_rejected,
  gateway_method_dispatchable,
  gateway_method_denied,
  // channel identity
  identity_wildcard_match,
  identity_id_match,
  identity_no_match,
  // webhook verification
  webhook_authentic,
  webhook_bad_signature,
  webhook_stale_timestamp,
  webhook_malformed_header,
  // skill integrity
  skill_manifest_intact,
  skill_manifest_mismatch,
  skill_high_entropy_blob,
  skill_raw_ip_url,
  skill_base64_command_block,
  skill_unreadable_file,
};

struct TaxonomyLabel {
  std::string surface;  // attack-surface vocabulary
  std::string stage;    // kill-chain stage vocabulary
};

// Total over DecisionReason; every reason maps to one (surface, stage) pair.
TaxonomyLabel label_decision(DecisionReason reason);

const char* decision_reason_name(DecisionReason reason);

// All DecisionReason values, for exhaustiveness checks and report tooling.
const std::vector<DecisionReason>& all_decision_reasons();

}  // namespace guardkit::provenance
