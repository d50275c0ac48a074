#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace guardkit::identity {

// Match provenance is a closed two-value set; there is deliberately no
// name/username variant, so a mutable-handle match cannot be represented.
enum class MatchSource { wildcard, id };

const char* match_source_name(MatchSource s);

struct AllowlistMatch {
  bool allowed = false;
  std::optional<std::string> match_key;
  std::optional<MatchSource> match_source;
};

struct SenderContext {
  std::string sender_id;                 // immutable platform-assigned identifier
  std::optional<std::string> raw_handle; // mutable display handle; logging only
};

// Authorizes exclusively against immutable identifiers: "*" and exact,
// case-sensitive sender_id matches. raw_handle is never consulted.
AllowlistMatch resolve_allowlist_identity(const std::vector<std::string>& allow_from,
                                          const SenderContext& sender);

enum class RepairOutcome { rewritten, passthrough, unresolved };

const char* repair_outcome_name(RepairOutcome o);

// Maps a mutable handle to its immutable platform id; nullopt on a miss.
// Real platform clients live outside this library; tests use table stubs.
using HandleLookup = std::function<std::optional<std::string>(const std::string&)>;

struct RepairResult {
  std::vector<std::string> repaired;                             // input order
  std::vector<std::pair<std::string, RepairOutcome>> report;     // input order
};

// Rewrites legacy handle entries ("@alice", bare usernames) to immutable ids
// via the injected lookup. Numeric and wildcard entries pass through; lookup
// misses and transport errors leave the entry in place, marked unresolved.
RepairResult repair_allow_from_handles(const std::vector<std::string>& entries,
                                       const HandleLookup& lookup);

}  // namespace guardkit::identity
