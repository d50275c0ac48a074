// guardkit: audit CLI over the policy-enforcement library. Loads a policy
// document, runs one engine check against files or arguments, and emits a
// machine-readable report with taxonomy labels.
//
// Exit codes: 0 pass/allow, 1 deny/violation, 2 approval required,
// 3 configuration or usage error.

#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "guardkit/audit_report.hpp"
#include "guardkit/exec_allowlist.hpp"
#include "guardkit/gateway_policy.hpp"
#include "guardkit/identity_allowlist.hpp"
#include "guardkit/policy_document.hpp"
#include "guardkit/sandbox_policy.hpp"
#include "guardkit/skill_integrity.hpp"
#include "guardkit/webhook_auth.hpp"
#include "json.hpp"

namespace {

using namespace guardkit;
using nlohmann::json;

constexpr int kExitAllow = 0;
constexpr int kExitDeny = 1;
constexpr int kExitApproval = 2;
constexpr int kExitConfigError = 3;

struct GlobalOptions {
  std::string policy_path;
  std::int64_t now = 0;
  bool now_set = false;
};

std::int64_t effective_now(const GlobalOptions& g) {
  return g.now_set ? g.now : static_cast<std::int64_t>(std::time(nullptr));
}

policy::PolicyDocument load_policy(const GlobalOptions& g) {
  if (g.policy_path.empty()) return policy::PolicyDocument{};
  return policy::PolicyDocument::load(g.policy_path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::map<std::string, std::string> read_table(const std::string& path) {
  std::map<std::string, std::string> table;
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read table file: " + path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    std::string key, value;
    if (row >> key >> value) table[key] = value;
  }
  return table;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    std::size_t b = item.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    std::size_t e = item.find_last_not_of(" \t");
    out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

sandbox::SandboxConfig parse_sandbox_config(const std::string& text) {
  json doc = json::parse(text);
  if (!doc.is_object()) throw std::runtime_error("sandbox config must be a JSON object");
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (it.key() != "binds" && it.key() != "network" && it.key() != "seccomp_profile" &&
        it.key() != "apparmor_profile") {
      throw std::runtime_error("unknown field \"" + it.key() + "\" in sandbox config");
    }
  }
  sandbox::SandboxConfig cfg;
  if (doc.contains("binds")) {
    for (const auto& b : doc["binds"]) cfg.binds.push_back(b.get<std::string>());
  }
  if (doc.contains("network")) cfg.network = doc["network"].get<std::string>();
  if (doc.contains("seccomp_profile")) {
    cfg.seccomp_profile = doc["seccomp_profile"].get<std::string>();
  }
  if (doc.contains("apparmor_profile")) {
    cfg.apparmor_profile = doc["apparmor_profile"].get<std::string>();
  }
  return cfg;
}

provenance::DecisionReason sandbox_reason(const sandbox::Violation& v) {
  using provenance::DecisionReason;
  if (v.field == "network") return DecisionReason::sandbox_host_network;
  if (v.field == "seccomp_profile") return DecisionReason::sandbox_unconfined_seccomp;
  if (v.field == "apparmor_profile") return DecisionReason::sandbox_unconfined_apparmor;
  if (v.reason.rfind("ancestor", 0) == 0) return DecisionReason::sandbox_ancestor_bind;
  if (v.reason.rfind("blocked", 0) == 0) return DecisionReason::sandbox_blocked_bind;
  return DecisionReason::sandbox_malformed_bind;
}

provenance::DecisionReason indicator_reason(skills::Indicator i) {
  using provenance::DecisionReason;
  switch (i) {
    case skills::Indicator::high_entropy_blob: return DecisionReason::skill_high_entropy_blob;
    case skills::Indicator::raw_ip_url: return DecisionReason::skill_raw_ip_url;
    case skills::Indicator::base64_command_block:
      return DecisionReason::skill_base64_command_block;
    case skills::Indicator::unreadable: return DecisionReason::skill_unreadable_file;
  }
  return DecisionReason::skill_unreadable_file;
}

int cmd_check_exec(const GlobalOptions& g, const std::string& command_text,
                   const std::vector<std::string>& argv_mode,
                   const std::string& store_path, const std::string& resolver_table,
                   const std::string& search_path) {
  auto pol = load_policy(g);
  auto config = pol.to_exec_policy();

  exec::ApprovalStore store;
  if (!store_path.empty()) store = exec::ApprovalStore::load(store_path);

  exec::PathResolver resolver;
  if (!resolver_table.empty()) {
    resolver = exec::make_table_resolver(read_table(resolver_table));
  } else {
    std::string dirs = search_path.empty() ? "/usr/local/bin:/usr/bin:/bin" : search_path;
    resolver = exec::make_search_path_resolver(split(dirs, ':'));
  }

  exec::ExecDecision decision;
  if (!argv_mode.empty()) {
    decision = exec::evaluate_argv(argv_mode, config, store, resolver);
  } else {
    decision = exec::evaluate_shell_allowlist({command_text}, config, store, resolver);
  }

  report::AuditReport rep;
  rep.add("check-exec", exec::verdict_name(decision.verdict),
          exec::to_decision_reason(decision.reason), decision.detail);
  std::cout << rep.serialize();

  switch (decision.verdict) {
    case exec::Verdict::Allow: return kExitAllow;
    case exec::Verdict::Deny: return kExitDeny;
    case exec::Verdict::RequireApproval: return kExitApproval;
  }
  return kExitConfigError;
}

int cmd_check_sandbox(const GlobalOptions& g, const std::string& config_path) {
  auto pol = load_policy(g);
  auto cfg = parse_sandbox_config(read_file(config_path));
  auto result = sandbox::validate_sandbox_config(cfg, pol.sandbox_blocklist_extra);

  report::AuditReport rep;
  if (result.ok() && result.warnings.empty()) {
    rep.add("check-sandbox", "ok", provenance::DecisionReason::sandbox_named_network,
            "no violations");
    rep.checks.back().reason = "clean";
  }
  for (const auto& v : result.violations) {
    rep.add("check-sandbox", "violation", sandbox_reason(v),
            v.field + ": " + v.reason + " (" + v.value + ")");
  }
  for (const auto& w : result.warnings) {
    rep.add("check-sandbox", "warning", provenance::DecisionReason::sandbox_named_network,
            w.field + ": " + w.reason + " (" + w.value + ")");
  }
  std::cout << rep.serialize();
  return result.ok() ? kExitAllow : kExitDeny;
}

int cmd_check_url(const GlobalOptions& g, const std::string& url) {
  auto pol = load_policy(g);
  auto decision = gateway::validate_gateway_url_override(url, pol.gateway);

  report::AuditReport rep;
  using provenance::DecisionReason;
  DecisionReason reason = decision.outcome == gateway::UrlOutcome::allowed
                              ? DecisionReason::gateway_url_allowed
                          : decision.outcome == gateway::UrlOutcome::no_override
                              ? DecisionReason::gateway_url_no_override
                              : DecisionReason::gateway_url_rejected;
  const char* verdict = decision.outcome == gateway::UrlOutcome::rejected ? "rejected"
                                                                          : "allowed";
  rep.add("check-url", verdict, reason, decision.reason);
  std::cout << rep.serialize();
  return decision.outcome == gateway::UrlOutcome::rejected ? kExitDeny : kExitAllow;
}

int cmd_check_method(const std::string& method) {
  auto decision = gateway::gate_node_invoke_method(method);
  report::AuditReport rep;
  rep.add("check-method", decision.dispatchable ? "dispatchable" : "denied",
          decision.dispatchable ? provenance::DecisionReason::gateway_method_dispatchable
                                : provenance::DecisionReason::gateway_method_denied,
          method + ": " + decision.reason);
  std::cout << rep.serialize();
  return decision.dispatchable ? kExitAllow : kExitDeny;
}

int cmd_check_identity(const std::string& allow_from_csv, const std::string& sender_id,
                       const std::string& raw_handle) {
  identity::SenderContext sender;
  sender.sender_id = sender_id;
  if (!raw_handle.empty()) sender.raw_handle = raw_handle;
  auto match = identity::resolve_allowlist_identity(split(allow_from_csv, ','), sender);

  report::AuditReport rep;
  using provenance::DecisionReason;
  DecisionReason reason = !match.allowed ? DecisionReason::identity_no_match
                          : match.match_source == identity::MatchSource::wildcard
                              ? DecisionReason::identity_wildcard_match
                              : DecisionReason::identity_id_match;
  rep.add("check-identity", match.allowed ? "allowed" : "denied", reason,
          match.allowed ? "matched " + *match.match_key : "no allowlist match");
  std::cout << rep.serialize();
  return match.allowed ? kExitAllow : kExitDeny;
}

int cmd_verify_webhook(const GlobalOptions& g, const std::string& body_path,
                       const std::string& signature, const std::string& secret,
                       const std::string& secret_file, const std::string& timestamp,
                       std::int64_t tolerance) {
  webhook::WebhookVerificationRequest req;
  req.body = read_file(body_path);
  req.signature_header = signature;
  req.secret = secret_file.empty() ? secret : read_file(secret_file);
  if (!timestamp.empty()) req.timestamp_header = timestamp;
  req.tolerance_seconds = tolerance;

  auto decision = webhook::verify_webhook(req, effective_now(g));

  report::AuditReport rep;
  using provenance::DecisionReason;
  DecisionReason reason;
  switch (decision.outcome) {
    case webhook::WebhookOutcome::authentic:
      reason = DecisionReason::webhook_authentic;
      break;
    case webhook::WebhookOutcome::bad_signature:
      reason = DecisionReason::webhook_bad_signature;
      break;
    case webhook::WebhookOutcome::stale_timestamp:
      reason = DecisionReason::webhook_stale_timestamp;
      break;
    case webhook::WebhookOutcome::malformed_header:
      reason = DecisionReason::webhook_malformed_header;
      break;
  }
  rep.add("verify-webhook",
          decision.outcome == webhook::WebhookOutcome::authentic ? "authentic" : "rejected",
          reason, decision.detail);
  std::cout << rep.serialize();
  return decision.outcome == webhook::WebhookOutcome::authentic ? kExitAllow : kExitDeny;
}

int cmd_scan_skill(const GlobalOptions& g, const std::string& dir,
                   double entropy_threshold_flag, bool threshold_set,
                   const std::string& manifest_out, const std::string& verify_path) {
  auto pol = load_policy(g);
  double threshold = threshold_set ? entropy_threshold_flag : pol.entropy_threshold;

  report::AuditReport rep;
  bool bad = false;

  auto scan = skills::scan_indicators(dir, threshold);
  for (const auto& f : scan.findings) {
    bad = true;
    rep.add("scan-skill", "finding", indicator_reason(f.indicator),
            f.path + ": " + f.detail);
  }

  if (!verify_path.empty()) {
    auto manifest = skills::SkillManifest::load(verify_path);
    auto result = skills::verify_manifest(dir, manifest);
    if (result.intact()) {
      rep.add("scan-skill", "intact", provenance::DecisionReason::skill_manifest_intact,
              "directory matches manifest");
    }
    for (const auto& m : result.mismatches) {
      bad = true;
      rep.add("scan-skill", "mismatch", provenance::DecisionReason::skill_manifest_mismatch,
              m.path + ": " + skills::mismatch_kind_name(m.kind));
    }
  }

  if (!manifest_out.empty()) {
    skills::build_manifest(dir).save(manifest_out);
  }

  if (rep.checks.empty()) {
    rep.add("scan-skill", "clean", provenance::DecisionReason::skill_manifest_intact,
            "no indicators found");
  }
  std::cout << rep.serialize();
  return bad ? kExitDeny : kExitAllow;
}

int cmd_repair_config(const std::string& config_path, const std::string& table_path,
                      bool in_place) {
  json doc = json::parse(read_file(config_path));
  if (!doc.is_object() || !doc.contains("allow_from") || !doc["allow_from"].is_array()) {
    throw std::runtime_error("config must be an object with an allow_from array");
  }
  std::vector<std::string> entries;
  for (const auto& v : doc["allow_from"]) {
    if (v.is_string()) {
      entries.push_back(v.get<std::string>());
    } else if (v.is_number_integer()) {
      // platform configs accept numeric ids; normalize to decimal strings
      entries.push_back(std::to_string(v.get<std::int64_t>()));
    } else {
      throw std::runtime_error("allow_from entries must be strings or integers");
    }
  }

  auto table = read_table(table_path);
  identity::HandleLookup lookup = [&](const std::string& h) -> std::optional<std::string> {
    auto it = table.find(h);
    if (it == table.end()) return std::nullopt;
    return it->second;
  };
  auto result = identity::repair_allow_from_handles(entries, lookup);

  doc["allow_from"] = result.repaired;
  std::string out_path = in_place ? config_path : config_path + ".repaired";
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write repaired config: " + out_path);
  out << doc.dump(2) << "\n";

  json rep;
  rep["repaired_path"] = out_path;
  rep["entries"] = json::array();
  bool unresolved = false;
  for (const auto& [entry, outcome] : result.report) {
    json row;
    row["entry"] = entry;
    row["outcome"] = identity::repair_outcome_name(outcome);
    rep["entries"].push_back(row);
    if (outcome == identity::RepairOutcome::unresolved) unresolved = true;
  }
  std::cout << rep.dump(2) << "\n";
  return unresolved ? kExitDeny : kExitAllow;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"guardkit: policy enforcement and audit checks for agent execution runtimes"};
  app.require_subcommand(1);
  app.fallthrough();

  // Everything after --argv is the direct argument vector, verbatim; it never
  // goes through option parsing.
  std::vector<std::string> argv_mode;
  std::vector<std::string> cli_words;
  for (int i = 0; i < argc; i++) {
    if (std::string(argv[i]) == "--argv") {
      for (int j = i + 1; j < argc; j++) argv_mode.emplace_back(argv[j]);
      break;
    }
    cli_words.emplace_back(argv[i]);
  }

  GlobalOptions g;
  app.add_option("--policy", g.policy_path, "policy document (JSON)");
  auto* now_opt = app.add_option("--now", g.now, "epoch seconds for time-dependent checks");

  // check-exec
  std::string command_text;
  std::string store_path, resolver_table, search_path;
  auto* check_exec = app.add_subcommand("check-exec", "evaluate a command against the exec allowlist");
  check_exec->add_option("command", command_text, "shell command text");
  check_exec->add_option("--store", store_path, "approval store file");
  check_exec->add_option("--resolver-table", resolver_table,
                         "executable resolution table (name path per line)");
  check_exec->add_option("--search-path", search_path, "colon-separated executable search path");

  // check-sandbox
  std::string sandbox_config_path;
  auto* check_sandbox = app.add_subcommand("check-sandbox", "validate a sandbox configuration");
  check_sandbox->add_option("config", sandbox_config_path, "sandbox config (JSON)")->required();

  // check-url
  std::string url;
  auto* check_url = app.add_subcommand("check-url", "validate a gateway URL override");
  check_url->add_option("url", url, "candidate gateway URL");

  // check-method
  std::string method;
  auto* check_method = app.add_subcommand("check-method", "gate a node-invoke method name");
  check_method->add_option("method", method, "dotted method name")->required();

  // check-identity
  std::string allow_from_csv, sender_id, raw_handle;
  auto* check_identity = app.add_subcommand("check-identity", "resolve a channel sender against an allowlist");
  check_identity->add_option("--allow-from", allow_from_csv, "comma-separated allowlist entries");
  check_identity->add_option("--sender-id", sender_id, "immutable platform sender id")->required();
  check_identity->add_option("--raw-handle", raw_handle, "mutable display handle (logging only)");

  // verify-webhook
  std::string body_path, signature, secret, secret_file, timestamp;
  std::int64_t tolerance = 300;
  auto* verify_webhook = app.add_subcommand("verify-webhook", "verify an inbound webhook signature");
  verify_webhook->add_option("--body", body_path, "file with the exact body bytes")->required();
  verify_webhook->add_option("--signature", signature, "hex signature header")->required();
  verify_webhook->add_option("--secret", secret, "shared secret");
  verify_webhook->add_option("--secret-file", secret_file, "file containing the shared secret");
  verify_webhook->add_option("--timestamp", timestamp, "timestamp header value");
  verify_webhook->add_option("--tolerance", tolerance, "replay tolerance in seconds");

  // scan-skill
  std::string skill_dir, manifest_out, verify_manifest_path;
  double entropy_threshold = 0.0;
  auto* scan_skill = app.add_subcommand("scan-skill", "scan a skill directory for dropper indicators");
  scan_skill->add_option("dir", skill_dir, "skill directory")->required();
  auto* thr_opt = scan_skill->add_option("--entropy-threshold", entropy_threshold,
                                         "bits/byte threshold for packed-blob findings");
  scan_skill->add_option("--manifest-out", manifest_out, "write a content manifest here");
  scan_skill->add_option("--verify", verify_manifest_path, "verify against this manifest");

  // repair-config
  std::string repair_path, repair_table;
  bool in_place = false;
  auto* repair_config = app.add_subcommand("repair-config", "rewrite handle allowlist entries to immutable ids");
  repair_config->add_option("config", repair_path, "channel config (JSON with allow_from)")->required();
  repair_config->add_option("--resolver-table", repair_table, "handle-to-id table file")->required();
  repair_config->add_flag("--in-place", in_place, "overwrite the config instead of writing .repaired");

  try {
    std::vector<char*> parse_argv;
    for (auto& w : cli_words) parse_argv.push_back(w.data());
    app.parse(static_cast<int>(parse_argv.size()), parse_argv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitConfigError;
  }
  g.now_set = now_opt->count() > 0;

  try {
    if (*check_exec) {
      if (command_text.empty() && argv_mode.empty()) {
        std::cerr << "check-exec: provide a command string or --argv\n";
        return kExitConfigError;
      }
      return cmd_check_exec(g, command_text, argv_mode, store_path, resolver_table,
                            search_path);
    }
    if (*check_sandbox) return cmd_check_sandbox(g, sandbox_config_path);
    if (*check_url) return cmd_check_url(g, url);
    if (*check_method) return cmd_check_method(method);
    if (*check_identity) return cmd_check_identity(allow_from_csv, sender_id, raw_handle);
    if (*verify_webhook) {
      if (secret.empty() && secret_file.empty()) {
        std::cerr << "verify-webhook: provide --secret or --secret-file\n";
        return kExitConfigError;
      }
      return cmd_verify_webhook(g, body_path, signature, secret, secret_file, timestamp,
                                tolerance);
    }
    if (*scan_skill) {
      return cmd_scan_skill(g, skill_dir, entropy_threshold, thr_opt->count() > 0,
                            manifest_out, verify_manifest_path);
    }
    if (*repair_config) return cmd_repair_config(repair_path, repair_table, in_place);
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
  return kExitConfigError;
}
