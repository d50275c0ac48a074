#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "guardkit/provenance.hpp"
#include "guardkit/safe_bin_policy.hpp"
#include "guardkit/shell_analysis.hpp"
#include "guardkit/wrapper_resolution.hpp"

namespace guardkit::exec {

class PolicyViolationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Scope { session, allow_always };
enum class ApprovalOrigin { operator_granted, approval_flow };

const char* scope_name(Scope s);
const char* approval_origin_name(ApprovalOrigin o);
std::optional<Scope> scope_from_name(const std::string& s);
std::optional<ApprovalOrigin> approval_origin_from_name(const std::string& s);

struct AllowlistEntry {
  std::string pattern;  // executable basename, or absolute path (normalized)
  Scope scope = Scope::allow_always;
  std::optional<std::string> safe_bin_profile;  // references a profile by binary name
};

struct ApprovalState {
  Scope scope = Scope::session;
  std::int64_t created_at = 0;  // seconds since epoch, UTC
  ApprovalOrigin origin = ApprovalOrigin::approval_flow;
};

// Persistent map from resolved executable identity to approval state. Keys
// are normalized absolute paths; multiplexer basenames are rejected at insert
// so that "busybox"/"toybox" can never become a persisted identity.
class ApprovalStore {
 public:
  const std::map<std::string, ApprovalState>& entries() const { return entries_; }
  bool contains(const std::string& identity) const { return entries_.count(identity) != 0; }
  std::optional<ApprovalState> find(const std::string& identity) const;
  void insert(const std::string& identity, ApprovalState state,
              const std::set<std::string>& multiplexer_names);
  void clear() { entries_.clear(); }

  // Line-oriented persistence: one JSON document per line after a version
  // header. Serialization is canonical (entries sorted by identity).
  std::string serialize() const;
  static ApprovalStore parse(const std::string& text);
  void save(const std::string& path) const;
  static ApprovalStore load(const std::string& path);

  bool operator==(const ApprovalStore& other) const;

 private:
  std::map<std::string, ApprovalState> entries_;
};

enum class Verdict { Allow, Deny, RequireApproval };

enum class ExecReason {
  analysis_failure,
  not_allowlisted,
  denied_flag,
  blocked_multiplexer,
  expansion_present,
  approved,
  allowlisted,
};

const char* verdict_name(Verdict v);
const char* exec_reason_name(ExecReason r);
provenance::DecisionReason to_decision_reason(ExecReason r);

struct ExecDecision {
  Verdict verdict = Verdict::RequireApproval;
  ExecReason reason = ExecReason::not_allowlisted;
  provenance::TaxonomyLabel taxonomy;
  std::string detail;
};

// Maps a command word to a resolved executable identity (normalized absolute
// path), or nullopt when unresolvable. Implementations must not consult
// ambient process environment.
using PathResolver = std::function<std::optional<std::string>(const std::string&)>;

PathResolver make_table_resolver(std::map<std::string, std::string> table);
// Resolves basenames against an explicit directory list using the local
// filesystem (regular file with an execute bit); absolute words normalize to
// themselves when they probe as executable.
PathResolver make_search_path_resolver(std::vector<std::string> directories);

// Everything the exec decision pipeline consumes, as plain data.
struct ExecPolicyConfig {
  std::vector<AllowlistEntry> allowlist;
  std::vector<safebin::SafeBinProfile> safe_bin_profiles = safebin::default_profiles();
  shell::AnalysisPolicy analysis;
  std::set<std::string> shell_applets = wrappers::default_shell_applets();
  std::set<std::string> multiplexer_names = wrappers::default_multiplexer_names();
  bool reanalyze_inner_shell = true;
  int max_shell_depth = 8;
};

// Three-phase decision pipeline over a raw shell string: lexical analysis and
// allowlist evaluation, approval-state lookup, then the chain verdict under
// Deny < RequireApproval < Allow. Never executes anything.
// Throws std::invalid_argument on empty command text.
ExecDecision evaluate_shell_allowlist(const shell::RawCommand& raw,
                                      const ExecPolicyConfig& config,
                                      const ApprovalStore& store,
                                      const PathResolver& path_resolver);

// Direct-argv mode: no shell string, no tokenization. Wrapper and multiplexer
// unwrapping and safe-bin checks still apply.
ExecDecision evaluate_argv(const std::vector<std::string>& argv,
                           const ExecPolicyConfig& config,
                           const ApprovalStore& store,
                           const PathResolver& path_resolver);

// Records an approval for a resolved executable identity. The identity must
// be a normalized absolute path; multiplexer basenames throw
// PolicyViolationError and are never persisted.
void record_approval(ApprovalStore& store, const std::string& identity, Scope scope,
                     ApprovalOrigin origin, std::int64_t now,
                     const std::set<std::string>& multiplexer_names =
                         wrappers::default_multiplexer_names());

}  // namespace guardkit::exec
