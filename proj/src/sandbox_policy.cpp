#include "guardkit/sandbox_policy.hpp"

#include <cctype>

#include "guardkit/path_util.hpp"

namespace guardkit::sandbox {

namespace {

using pathutil::is_path_ancestor;
using pathutil::normalize_posix_path;

bool looks_like_windows_path(const std::string& src) {
  if (src.find('\\') != std::string::npos) return true;
  return src.size() == 1 && std::isalpha(static_cast<unsigned char>(src[0])) != 0;
}

}  // namespace

const std::vector<std::string>& blocked_host_path_floor() {
  static const std::vector<std::string> kFloor = {
      "/etc", "/proc", "/sys", "/dev", "/root", "/boot",
      "/var/run/docker.sock", "/run/docker.sock",
      // macOS aliases
      "/private/etc", "/private/var/run/docker.sock",
  };
  return kFloor;
}

ValidationResult validate_bind_mounts(const std::vector<std::string>& binds,
                                      const std::vector<std::string>& extra_blocked,
                                      const FsProbe& fs_probe) {
  std::vector<std::string> blocked;
  for (const auto& p : blocked_host_path_floor()) blocked.push_back(normalize_posix_path(p));
  for (const auto& p : extra_blocked) blocked.push_back(normalize_posix_path(p));

  ValidationResult result;
  for (const auto& bind : binds) {
    std::size_t colon = bind.find(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 >= bind.size()) {
      result.violations.push_back({"binds", "malformed bind string", bind});
      continue;
    }
    std::string source = bind.substr(0, colon);
    if (looks_like_windows_path(source)) {
      result.violations.push_back({"binds", "malformed bind string", bind});
      continue;
    }
    if (fs_probe) source = fs_probe(source);
    source = normalize_posix_path(source);
    if (source.empty() || source[0] != '/') {
      result.violations.push_back({"binds", "relative bind source", bind});
      continue;
    }
    bool hit = false;
    for (const auto& b : blocked) {
      if (source == b || is_path_ancestor(b, source)) {
        result.violations.push_back({"binds", "blocked host path: " + source, bind});
        hit = true;
        break;
      }
    }
    if (hit) continue;
    for (const auto& b : blocked) {
      if (is_path_ancestor(source, b)) {
        result.violations.push_back(
            {"binds", "ancestor of blocked path " + b + ": " + source, bind});
        break;
      }
    }
  }
  return result;
}

ValidationResult validate_sandbox_config(const SandboxConfig& config,
                                         const std::vector<std::string>& extra_blocked,
                                         const FsProbe& fs_probe) {
  ValidationResult result = validate_bind_mounts(config.binds, extra_blocked, fs_probe);

  if (config.network) {
    const std::string& n = *config.network;
    if (n == "host") {
      result.violations.push_back(
          {"network", "host network collapses container isolation", n});
    } else if (n != "none") {
      result.warnings.push_back({"network", "named network accepted (advisory)", n});
    }
  }
  // Missing network defaults to "none": no violation.

  if (config.seccomp_profile && *config.seccomp_profile == "unconfined") {
    result.violations.push_back(
        {"seccomp_profile", "unconfined disables seccomp enforcement", "unconfined"});
  }
  if (config.apparmor_profile && *config.apparmor_profile == "unconfined") {
    result.violations.push_back(
        {"apparmor_profile", "unconfined disables AppArmor enforcement", "unconfined"});
  }
  return result;
}

}  // namespace guardkit::sandbox
