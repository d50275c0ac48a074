#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace guardkit::sandbox {

struct SandboxConfig {
  std::vector<std::string> binds;  // "source:target[:mode]"
  std::optional<std::string> network;
  std::optional<std::string> seccomp_profile;
  std::optional<std::string> apparmor_profile;
};

struct Violation {
  std::string field;   // "binds", "network", "seccomp_profile", "apparmor_profile"
  std::string reason;
  std::string value;
};

struct ValidationResult {
  std::vector<Violation> violations;
  std::vector<Violation> warnings;  // advisory only; do not affect ok()

  bool ok() const { return violations.empty(); }
};

// Sensitive host paths that may never be bind-mounted, directly or via an
// ancestor. Operator policy can extend this floor but not shrink it.
const std::vector<std::string>& blocked_host_path_floor();

// Resolves symlinks in a bind source before policy comparison. Must be safe
// for concurrent calls.
using FsProbe = std::function<std::string(const std::string&)>;

// Two-tier bind-mount check: direct/descendant match against the blocklist,
// plus ancestor coverage so that mounting /run still trips on
// /run/docker.sock. Sources are normalized (and symlink-resolved when a probe
// is supplied) before both tiers. Malformed and relative sources are
// violations, not exceptions.
ValidationResult validate_bind_mounts(const std::vector<std::string>& binds,
                                      const std::vector<std::string>& extra_blocked = {},
                                      const FsProbe& fs_probe = nullptr);

// Aggregates bind validation with network and security-profile checks:
// network "host" and "unconfined" seccomp/AppArmor profiles are violations;
// a missing network defaults to "none"; other named networks are advisory
// warnings.
ValidationResult validate_sandbox_config(const SandboxConfig& config,
                                         const std::vector<std::string>& extra_blocked = {},
                                         const FsProbe& fs_probe = nullptr);

}  // namespace guardkit::sandbox
