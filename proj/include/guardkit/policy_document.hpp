#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "guardkit/exec_allowlist.hpp"
#include "guardkit/gateway_policy.hpp"
#include "guardkit/safe_bin_policy.hpp"

namespace guardkit::policy {

class PolicyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operator-authored configuration aggregating every module's policy inputs.
// Loading is strict: unknown fields are rejected, invariants are validated,
// and the sandbox blocklist floor is implicit and cannot be shrunk.
struct PolicyDocument {
  std::vector<exec::AllowlistEntry> allowlist;
  std::vector<safebin::SafeBinProfile> safe_bin_profiles;  // operator overrides/additions
  std::vector<std::string> sandbox_blocklist_extra;
  gateway::GatewayEndpointPolicy gateway;
  std::vector<std::string> dangerous_env_vars =
      shell::AnalysisPolicy::default_dangerous_env_vars();
  double entropy_threshold = 7.9;
  std::vector<std::string> shell_applets = {"sh", "ash", "bash", "hush"};
  std::vector<std::string> multiplexer_binaries = {"busybox", "toybox"};
  bool reanalyze_inner_shell = true;

  // Shipped profiles with operator profiles overriding by binary name.
  std::vector<safebin::SafeBinProfile> effective_profiles() const;

  exec::ExecPolicyConfig to_exec_policy() const;

  static PolicyDocument parse(const std::string& json_text);
  static PolicyDocument load(const std::string& path);
  std::string serialize() const;
};

}  // namespace guardkit::policy
