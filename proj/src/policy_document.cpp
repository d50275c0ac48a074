#include "guardkit/policy_document.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "guardkit/path_util.hpp"
#include "json.hpp"

namespace guardkit::policy {

namespace {

using nlohmann::json;

constexpr int kPolicyVersion = 1;

void require_known_fields(const json& obj, const std::set<std::string>& known,
                          const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (known.count(it.key()) == 0) {
      throw PolicyError("unknown field \"" + it.key() + "\" in " + where);
    }
  }
}

std::vector<std::string> string_list(const json& arr, const std::string& where) {
  if (!arr.is_array()) throw PolicyError(where + " must be an array");
  std::vector<std::string> out;
  for (const auto& v : arr) {
    if (!v.is_string()) throw PolicyError(where + " entries must be strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

std::set<char> char_set(const json& v, const std::string& where) {
  if (!v.is_string()) throw PolicyError(where + " must be a string of flag characters");
  std::set<char> out;
  for (char c : v.get<std::string>()) out.insert(c);
  return out;
}

exec::AllowlistEntry parse_allowlist_entry(const json& obj) {
  if (!obj.is_object()) throw PolicyError("allowlist entries must be objects");
  require_known_fields(obj, {"pattern", "scope", "safe_bin_profile"}, "allowlist entry");
  exec::AllowlistEntry e;
  if (!obj.contains("pattern") || !obj["pattern"].is_string()) {
    throw PolicyError("allowlist entry requires a string pattern");
  }
  e.pattern = obj["pattern"].get<std::string>();
  if (e.pattern.empty()) throw PolicyError("allowlist pattern must be non-empty");
  if (e.pattern[0] == '/') {
    e.pattern = pathutil::normalize_posix_path(e.pattern);
  }
  if (obj.contains("scope")) {
    auto s = exec::scope_from_name(obj["scope"].get<std::string>());
    if (!s) throw PolicyError("allowlist scope must be session or allow_always");
    e.scope = *s;
  }
  if (obj.contains("safe_bin_profile")) {
    if (!obj["safe_bin_profile"].is_string()) {
      throw PolicyError("safe_bin_profile must be a string");
    }
    e.safe_bin_profile = obj["safe_bin_profile"].get<std::string>();
  }
  return e;
}

void check_long_flags(const std::set<std::string>& flags, const std::string& binary) {
  for (const auto& f : flags) {
    if (f.size() < 3 || f.compare(0, 2, "--") != 0 || f.find('=') != std::string::npos) {
      throw PolicyError("long flag \"" + f + "\" in profile " + binary +
                        " must start with -- and contain no =");
    }
  }
}

safebin::SafeBinProfile parse_profile(const json& obj) {
  if (!obj.is_object()) throw PolicyError("safe_bin_profiles entries must be objects");
  require_known_fields(obj,
                       {"binary", "allowed_long_flags", "denied_long_flags",
                        "allowed_short_flags", "value_taking_short_flags",
                        "positional_policy"},
                       "safe-bin profile");
  safebin::SafeBinProfile p;
  if (!obj.contains("binary") || !obj["binary"].is_string()) {
    throw PolicyError("safe-bin profile requires a binary name");
  }
  p.binary = obj["binary"].get<std::string>();
  if (p.binary.empty()) throw PolicyError("safe-bin binary must be non-empty");
  if (obj.contains("allowed_long_flags")) {
    auto v = string_list(obj["allowed_long_flags"], "allowed_long_flags");
    p.allowed_long_flags.insert(v.begin(), v.end());
  }
  if (obj.contains("denied_long_flags")) {
    auto v = string_list(obj["denied_long_flags"], "denied_long_flags");
    p.denied_long_flags.insert(v.begin(), v.end());
  }
  check_long_flags(p.allowed_long_flags, p.binary);
  check_long_flags(p.denied_long_flags, p.binary);
  for (const auto& f : p.allowed_long_flags) {
    if (p.denied_long_flags.count(f) != 0) {
      throw PolicyError("flag \"" + f + "\" is both allowed and denied for " + p.binary);
    }
  }
  if (obj.contains("allowed_short_flags")) {
    p.allowed_short_flags = char_set(obj["allowed_short_flags"], "allowed_short_flags");
  }
  if (obj.contains("value_taking_short_flags")) {
    p.value_taking_short_flags =
        char_set(obj["value_taking_short_flags"], "value_taking_short_flags");
  }
  if (obj.contains("positional_policy")) {
    std::string s = obj["positional_policy"].get<std::string>();
    if (s == "any") {
      p.positional_policy = safebin::PositionalPolicy::any;
    } else if (s == "none") {
      p.positional_policy = safebin::PositionalPolicy::none;
    } else if (s == "files_only") {
      p.positional_policy = safebin::PositionalPolicy::files_only;
    } else {
      throw PolicyError("positional_policy must be any, none or files_only");
    }
  }
  return p;
}

const char* positional_policy_name(safebin::PositionalPolicy p) {
  switch (p) {
    case safebin::PositionalPolicy::any: return "any";
    case safebin::PositionalPolicy::none: return "none";
    case safebin::PositionalPolicy::files_only: return "files_only";
  }
  return "?";
}

}  // namespace

std::vector<safebin::SafeBinProfile> PolicyDocument::effective_profiles() const {
  std::vector<safebin::SafeBinProfile> merged = safebin::default_profiles();
  for (const auto& p : safe_bin_profiles) {
    auto it = std::find_if(merged.begin(), merged.end(),
                           [&](const safebin::SafeBinProfile& d) { return d.binary == p.binary; });
    if (it != merged.end()) {
      *it = p;
    } else {
      merged.push_back(p);
    }
  }
  return merged;
}

exec::ExecPolicyConfig PolicyDocument::to_exec_policy() const {
  exec::ExecPolicyConfig config;
  config.allowlist = allowlist;
  config.safe_bin_profiles = effective_profiles();
  config.analysis.dangerous_env_vars = dangerous_env_vars;
  config.shell_applets = std::set<std::string>(shell_applets.begin(), shell_applets.end());
  config.multiplexer_names =
      std::set<std::string>(multiplexer_binaries.begin(), multiplexer_binaries.end());
  config.reanalyze_inner_shell = reanalyze_inner_shell;
  return config;
}

PolicyDocument PolicyDocument::parse(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw PolicyError(std::string("policy is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw PolicyError("policy document must be a JSON object");
  require_known_fields(doc,
                       {"version", "allowlist", "safe_bin_profiles",
                        "sandbox_blocklist_extra", "gateway", "dangerous_env_vars",
                        "entropy_threshold", "shell_applets", "multiplexer_binaries",
                        "reanalyze_inner_shell"},
                       "policy document");
  if (!doc.contains("version") || !doc["version"].is_number_integer() ||
      doc["version"].get<int>() != kPolicyVersion) {
    throw PolicyError("policy document requires \"version\": 1");
  }

  PolicyDocument p;
  if (doc.contains("allowlist")) {
    if (!doc["allowlist"].is_array()) throw PolicyError("allowlist must be an array");
    for (const auto& e : doc["allowlist"]) p.allowlist.push_back(parse_allowlist_entry(e));
  }
  if (doc.contains("safe_bin_profiles")) {
    if (!doc["safe_bin_profiles"].is_array()) {
      throw PolicyError("safe_bin_profiles must be an array");
    }
    for (const auto& e : doc["safe_bin_profiles"]) {
      p.safe_bin_profiles.push_back(parse_profile(e));
    }
  }
  if (doc.contains("sandbox_blocklist_extra")) {
    p.sandbox_blocklist_extra =
        string_list(doc["sandbox_blocklist_extra"], "sandbox_blocklist_extra");
    for (const auto& path : p.sandbox_blocklist_extra) {
      if (path.empty() || path[0] != '/') {
        throw PolicyError("sandbox_blocklist_extra entries must be absolute paths");
      }
    }
  }
  if (doc.contains("gateway")) {
    const json& g = doc["gateway"];
    if (!g.is_object()) throw PolicyError("gateway must be an object");
    require_known_fields(g, {"port", "remote_url"}, "gateway");
    if (g.contains("port")) {
      if (!g["port"].is_number_integer()) throw PolicyError("gateway.port must be an integer");
      int port = g["port"].get<int>();
      if (port < 1 || port > 65535) throw PolicyError("gateway.port must be in 1..65535");
      p.gateway.port = port;
    }
    if (g.contains("remote_url")) {
      if (!g["remote_url"].is_string()) throw PolicyError("gateway.remote_url must be a string");
      std::string url = g["remote_url"].get<std::string>();
      if (!gateway::canonicalize_endpoint(url)) {
        throw PolicyError("gateway.remote_url does not parse as an endpoint: " + url);
      }
      p.gateway.remote_url = url;
    }
  }
  if (doc.contains("dangerous_env_vars")) {
    p.dangerous_env_vars = string_list(doc["dangerous_env_vars"], "dangerous_env_vars");
  }
  if (doc.contains("entropy_threshold")) {
    if (!doc["entropy_threshold"].is_number()) {
      throw PolicyError("entropy_threshold must be a number");
    }
    p.entropy_threshold = doc["entropy_threshold"].get<double>();
    if (p.entropy_threshold < 0.0 || p.entropy_threshold > 8.0) {
      throw PolicyError("entropy_threshold must be within [0, 8]");
    }
  }
  if (doc.contains("shell_applets")) {
    p.shell_applets = string_list(doc["shell_applets"], "shell_applets");
  }
  if (doc.contains("multiplexer_binaries")) {
    p.multiplexer_binaries = string_list(doc["multiplexer_binaries"], "multiplexer_binaries");
  }
  if (doc.contains("reanalyze_inner_shell")) {
    if (!doc["reanalyze_inner_shell"].is_boolean()) {
      throw PolicyError("reanalyze_inner_shell must be a boolean");
    }
    p.reanalyze_inner_shell = doc["reanalyze_inner_shell"].get<bool>();
  }

  // Allowlist profile references must resolve against the merged profiles.
  auto profiles = p.effective_profiles();
  for (const auto& e : p.allowlist) {
    if (!e.safe_bin_profile) continue;
    bool found = std::any_of(profiles.begin(), profiles.end(),
                             [&](const safebin::SafeBinProfile& prof) {
                               return prof.binary == *e.safe_bin_profile;
                             });
    if (!found) {
      throw PolicyError("allowlist entry \"" + e.pattern +
                        "\" references unknown safe_bin_profile \"" +
                        *e.safe_bin_profile + "\"");
    }
  }
  return p;
}

PolicyDocument PolicyDocument::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PolicyError("cannot read policy file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string PolicyDocument::serialize() const {
  json doc;
  doc["version"] = kPolicyVersion;
  doc["allowlist"] = json::array();
  for (const auto& e : allowlist) {
    json o;
    o["pattern"] = e.pattern;
    o["scope"] = exec::scope_name(e.scope);
    if (e.safe_bin_profile) o["safe_bin_profile"] = *e.safe_bin_profile;
    doc["allowlist"].push_back(o);
  }
  doc["safe_bin_profiles"] = json::array();
  for (const auto& p : safe_bin_profiles) {
    json o;
    o["binary"] = p.binary;
    o["allowed_long_flags"] = p.allowed_long_flags;
    o["denied_long_flags"] = p.denied_long_flags;
    o["allowed_short_flags"] = std::string(p.allowed_short_flags.begin(),
                                           p.allowed_short_flags.end());
    o["value_taking_short_flags"] = std::string(p.value_taking_short_flags.begin(),
                                                p.value_taking_short_flags.end());
    o["positional_policy"] = positional_policy_name(p.positional_policy);
    doc["safe_bin_profiles"].push_back(o);
  }
  doc["sandbox_blocklist_extra"] = sandbox_blocklist_extra;
  doc["gateway"]["port"] = gateway.port;
  if (gateway.remote_url) doc["gateway"]["remote_url"] = *gateway.remote_url;
  doc["dangerous_env_vars"] = dangerous_env_vars;
  doc["entropy_threshold"] = entropy_threshold;
  doc["shell_applets"] = shell_applets;
  doc["multiplexer_binaries"] = multiplexer_binaries;
  doc["reanalyze_inner_shell"] = reanalyze_inner_shell;
  return doc.dump(2) + "\n";
}

}  // namespace guardkit::policy
