#include "guardkit/exec_allowlist.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "guardkit/path_util.hpp"
#include "json.hpp"

namespace guardkit::exec {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kStoreFormat = "guardkit-approval-store";
constexpr int kStoreVersion = 1;

int severity(Verdict v) {
  switch (v) {
    case Verdict::Deny: return 0;
    case Verdict::RequireApproval: return 1;
    case Verdict::Allow: return 2;
  }
  return 0;
}

struct CommandResult {
  Verdict verdict;
  ExecReason reason;
  std::string detail;
};

CommandResult deny(ExecReason r, std::string detail) {
  return {Verdict::Deny, r, std::move(detail)};
}
CommandResult require(ExecReason r, std::string detail) {
  return {Verdict::RequireApproval, r, std::move(detail)};
}
CommandResult allow(ExecReason r, std::string detail) {
  return {Verdict::Allow, r, std::move(detail)};
}

ExecDecision to_decision(const CommandResult& r) {
  ExecDecision d;
  d.verdict = r.verdict;
  d.reason = r.reason;
  d.taxonomy = provenance::label_decision(to_decision_reason(r.reason));
  d.detail = r.detail;
  return d;
}

// Parses the option prefix of a shell invocation like `sh -ec payload` and
// extracts the -c command string. Unknown option letters make the invocation
// non-analyzable.
struct ShellPayload {
  bool parse_ok = false;
  std::optional<std::string> payload;
};

ShellPayload extract_dash_c_payload(const shell::SimpleCommand& cmd) {
  static const std::string kShellOptionLetters = "abCefhmnuvxc";
  ShellPayload out;
  bool want_c = false;
  std::size_t i = 1;
  for (; i < cmd.argv.size(); i++) {
    const std::string& t = cmd.argv[i];
    if (t == "--") {
      i++;
      break;
    }
    if (t.size() < 2 || t[0] != '-') break;
    if (t[1] == '-') return out;  // long shell options: not analyzable
    for (std::size_t j = 1; j < t.size(); j++) {
      if (kShellOptionLetters.find(t[j]) == std::string::npos) return out;
      if (t[j] == 'c') want_c = true;
    }
  }
  out.parse_ok = true;
  if (want_c && i < cmd.argv.size()) out.payload = cmd.argv[i];
  return out;
}

const safebin::SafeBinProfile* find_profile(const ExecPolicyConfig& config,
                                            const std::string& name) {
  for (const auto& p : config.safe_bin_profiles) {
    if (p.binary == name) return &p;
  }
  return nullptr;
}

// Profile-carrying entries outrank profile-less ones so that adding a bare
// entry can never bypass an existing safe-bin restriction; absolute patterns
// outrank basenames within each class.
const AllowlistEntry* match_allowlist(const ExecPolicyConfig& config,
                                      const std::string& identity) {
  const std::string base = wrappers::executable_basename(identity);
  const AllowlistEntry* best = nullptr;
  int best_rank = 99;
  for (const auto& e : config.allowlist) {
    if (e.pattern.empty()) continue;
    bool matched = e.pattern[0] == '/'
                       ? pathutil::normalize_posix_path(e.pattern) == identity
                       : e.pattern == base;
    if (!matched) continue;
    int rank = (e.safe_bin_profile ? 0 : 2) + (e.pattern[0] == '/' ? 0 : 1);
    if (rank < best_rank) {
      best = &e;
      best_rank = rank;
    }
  }
  return best;
}

class Evaluator {
 public:
  Evaluator(const ExecPolicyConfig& config, const ApprovalStore& store,
            const PathResolver& resolver)
      : config_(config), store_(store), resolver_(resolver) {}

  CommandResult eval_chain(const shell::CommandChain& chain, int depth) {
    CommandResult best = allow(ExecReason::allowlisted, "");
    bool any_approved = false;
    bool have = false;
    for (const auto& cmd : chain.commands) {
      CommandResult r = eval_command(cmd, depth);
      if (r.verdict == Verdict::Allow && r.reason == ExecReason::approved) {
        any_approved = true;
      }
      if (!have || severity(r.verdict) < severity(best.verdict)) {
        best = r;
        have = true;
      }
    }
    if (best.verdict == Verdict::Allow && any_approved) {
      best.reason = ExecReason::approved;
    }
    return best;
  }

  CommandResult eval_command(const shell::SimpleCommand& cmd, int depth) {
    if (depth > config_.max_shell_depth) {
      return deny(ExecReason::blocked_multiplexer, "shell re-analysis depth exceeded");
    }

    auto wr = wrappers::unwrap_known_wrappers(cmd);
    if (wr.is_blocked()) {
      return deny(ExecReason::blocked_multiplexer, wr.as_blocked().reason);
    }
    shell::SimpleCommand effective = wr.is_unwrapped() ? wr.as_unwrapped().inner : cmd;

    // Dangerous assignments carried through a wrapper (`env LD_PRELOAD=… cmd`)
    // are as opaque as prefix assignments; same fail-closed outcome.
    for (const auto& [name, value] : effective.env_assignments) {
      for (const auto& dangerous : config_.analysis.dangerous_env_vars) {
        if (name == dangerous) {
          return require(ExecReason::analysis_failure,
                         "dangerous environment assignment: " + name);
        }
      }
    }

    bool from_multiplexer = false;
    auto mux = wrappers::unwrap_shell_multiplexer(effective, config_.shell_applets,
                                                  config_.multiplexer_names);
    if (mux.is_blocked()) {
      return deny(ExecReason::blocked_multiplexer, mux.as_blocked().reason);
    }
    if (mux.is_unwrapped()) {
      effective = mux.as_unwrapped().inner;
      from_multiplexer = true;
    }

    if (!effective.argv.empty() &&
        config_.shell_applets.count(wrappers::executable_basename(effective.argv[0])) != 0) {
      if (!config_.reanalyze_inner_shell) {
        if (from_multiplexer) {
          return deny(ExecReason::blocked_multiplexer,
                      "multiplexer shell applet with re-analysis disabled");
        }
        // fall through: the shell binary is evaluated like any other command
      } else {
        return eval_shell_invocation(effective, depth);
      }
    } else if (from_multiplexer) {
      // unreachable: multiplexer unwrap only yields shell applets
      return deny(ExecReason::blocked_multiplexer, "unexpected multiplexer applet");
    }

    return eval_plain(effective);
  }

 private:
  CommandResult eval_shell_invocation(const shell::SimpleCommand& sh, int depth) {
    ShellPayload p = extract_dash_c_payload(sh);
    if (!p.parse_ok) {
      return require(ExecReason::not_allowlisted,
                     "shell invocation with unrecognized options");
    }
    if (!p.payload) {
      // Script or interactive mode: contents invisible to lexical analysis.
      return require(ExecReason::not_allowlisted,
                     "shell invocation without -c payload");
    }
    shell::CommandAnalysis sub = [&]() {
      try {
        return shell::analyze({*p.payload}, config_.analysis);
      } catch (const std::invalid_argument&) {
        return shell::CommandAnalysis::failure(shell::FailureReason::unsupported_construct, 0);
      }
    }();
    if (sub.is_failure()) {
      return require(ExecReason::analysis_failure,
                     std::string("inner shell payload: ") +
                         shell::failure_reason_name(sub.as_failure().reason));
    }
    return eval_chain(sub.as_chain(), depth + 1);
  }

  CommandResult eval_plain(const shell::SimpleCommand& cmd) {
    if (cmd.argv.empty()) {
      return require(ExecReason::not_allowlisted, "empty command");
    }
    if (cmd.word_has_expansion(0)) {
      return require(ExecReason::expansion_present,
                     "parameter expansion in command word: " + cmd.argv[0]);
    }
    std::optional<std::string> identity = resolver_(cmd.argv[0]);
    if (!identity) {
      return require(ExecReason::not_allowlisted,
                     "unresolvable executable: " + cmd.argv[0]);
    }

    if (const AllowlistEntry* entry = match_allowlist(config_, *identity)) {
      if (entry->safe_bin_profile) {
        const auto* profile = find_profile(config_, *entry->safe_bin_profile);
        if (profile == nullptr) {
          return require(ExecReason::analysis_failure,
                         "missing safe-bin profile: " + *entry->safe_bin_profile);
        }
        safebin::TokenDecision d;
        try {
          d = safebin::evaluate_safe_bin(cmd, *profile);
        } catch (const std::invalid_argument&) {
          return require(ExecReason::analysis_failure,
                         "profile does not apply to " + cmd.argv[0]);
        }
        switch (d) {
          case safebin::TokenDecision::permitted:
            return allow(ExecReason::allowlisted, *identity);
          case safebin::TokenDecision::denied:
            return deny(ExecReason::denied_flag, *identity);
          case safebin::TokenDecision::analysis_failure:
            return require(ExecReason::analysis_failure,
                           "flag outside safe-bin profile for " + *identity);
        }
      }
      return allow(ExecReason::allowlisted, *identity);
    }

    if (store_.contains(*identity)) {
      return allow(ExecReason::approved, *identity);
    }
    return require(ExecReason::not_allowlisted, *identity);
  }

  const ExecPolicyConfig& config_;
  const ApprovalStore& store_;
  const PathResolver& resolver_;
};

}  // namespace

const char* scope_name(Scope s) {
  return s == Scope::session ? "session" : "allow_always";
}

const char* approval_origin_name(ApprovalOrigin o) {
  return o == ApprovalOrigin::operator_granted ? "operator" : "approval_flow";
}

std::optional<Scope> scope_from_name(const std::string& s) {
  if (s == "session") return Scope::session;
  if (s == "allow_always") return Scope::allow_always;
  return std::nullopt;
}

std::optional<ApprovalOrigin> approval_origin_from_name(const std::string& s) {
  if (s == "operator") return ApprovalOrigin::operator_granted;
  if (s == "approval_flow") return ApprovalOrigin::approval_flow;
  return std::nullopt;
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Allow: return "allow";
    case Verdict::Deny: return "deny";
    case Verdict::RequireApproval: return "require_approval";
  }
  return "?";
}

const char* exec_reason_name(ExecReason r) {
  switch (r) {
    case ExecReason::analysis_failure: return "analysis_failure";
    case ExecReason::not_allowlisted: return "not_allowlisted";
    case ExecReason::denied_flag: return "denied_flag";
    case ExecReason::blocked_multiplexer: return "blocked_multiplexer";
    case ExecReason::expansion_present: return "expansion_present";
    case ExecReason::approved: return "approved";
    case ExecReason::allowlisted: return "allowlisted";
  }
  return "?";
}

provenance::DecisionReason to_decision_reason(ExecReason r) {
  using provenance::DecisionReason;
  switch (r) {
    case ExecReason::analysis_failure: return DecisionReason::exec_analysis_failure;
    case ExecReason::not_allowlisted: return DecisionReason::exec_not_allowlisted;
    case ExecReason::denied_flag: return DecisionReason::exec_denied_flag;
    case ExecReason::blocked_multiplexer: return DecisionReason::exec_blocked_multiplexer;
    case ExecReason::expansion_present: return DecisionReason::exec_expansion_present;
    case ExecReason::approved: return DecisionReason::exec_approved;
    case ExecReason::allowlisted: return DecisionReason::exec_allowlisted;
  }
  return DecisionReason::exec_not_allowlisted;
}

std::optional<ApprovalState> ApprovalStore::find(const std::string& identity) const {
  auto it = entries_.find(identity);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void ApprovalStore::insert(const std::string& identity, ApprovalState state,
                           const std::set<std::string>& multiplexer_names) {
  if (identity.empty() || identity[0] != '/') {
    throw std::invalid_argument("approval identity must be an absolute path: " + identity);
  }
  if (pathutil::normalize_posix_path(identity) != identity) {
    throw std::invalid_argument("approval identity must be normalized: " + identity);
  }
  if (multiplexer_names.count(wrappers::executable_basename(identity)) != 0) {
    throw PolicyViolationError("refusing to persist multiplexer identity: " + identity);
  }
  entries_[identity] = state;
}

std::string ApprovalStore::serialize() const {
  std::ostringstream out;
  json header;
  header["format"] = kStoreFormat;
  header["version"] = kStoreVersion;
  out << header.dump() << "\n";
  for (const auto& [identity, state] : entries_) {
    json rec;
    rec["identity"] = identity;
    rec["scope"] = scope_name(state.scope);
    rec["created_at"] = state.created_at;
    rec["origin"] = approval_origin_name(state.origin);
    out << rec.dump() << "\n";
  }
  return out.str();
}

ApprovalStore ApprovalStore::parse(const std::string& text) {
  ApprovalStore store;
  std::istringstream in(text);
  std::string line;
  bool saw_header = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    line_no++;
    if (line.empty()) continue;
    json doc = json::parse(line);  // throws json::parse_error on bad input
    if (!saw_header) {
      if (!doc.is_object() || doc.value("format", "") != kStoreFormat ||
          doc.value("version", 0) != kStoreVersion) {
        throw std::runtime_error("approval store: bad header line");
      }
      saw_header = true;
      continue;
    }
    if (!doc.is_object()) {
      throw std::runtime_error("approval store: record is not an object at line " +
                               std::to_string(line_no));
    }
    std::string identity = doc.at("identity").get<std::string>();
    auto scope = scope_from_name(doc.at("scope").get<std::string>());
    auto origin = approval_origin_from_name(doc.at("origin").get<std::string>());
    if (!scope || !origin) {
      throw std::runtime_error("approval store: bad enum value at line " +
                               std::to_string(line_no));
    }
    ApprovalState state{*scope, doc.at("created_at").get<std::int64_t>(), *origin};
    store.insert(identity, state, wrappers::default_multiplexer_names());
  }
  if (!saw_header) {
    throw std::runtime_error("approval store: missing header");
  }
  return store;
}

void ApprovalStore::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write approval store: " + path);
  out << serialize();
}

ApprovalStore ApprovalStore::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read approval store: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

bool ApprovalStore::operator==(const ApprovalStore& other) const {
  if (entries_.size() != other.entries_.size()) return false;
  for (const auto& [k, v] : entries_) {
    auto it = other.entries_.find(k);
    if (it == other.entries_.end()) return false;
    if (it->second.scope != v.scope || it->second.created_at != v.created_at ||
        it->second.origin != v.origin) {
      return false;
    }
  }
  return true;
}

PathResolver make_table_resolver(std::map<std::string, std::string> table) {
  return [table = std::move(table)](const std::string& word) -> std::optional<std::string> {
    auto it = table.find(word);
    if (it == table.end()) return std::nullopt;
    return pathutil::normalize_posix_path(it->second);
  };
}

PathResolver make_search_path_resolver(std::vector<std::string> directories) {
  return [dirs = std::move(directories)](const std::string& word) -> std::optional<std::string> {
    auto executable = [](const fs::path& p) {
      std::error_code ec;
      if (!fs::is_regular_file(p, ec)) return false;
      auto perms = fs::status(p, ec).permissions();
      return (perms & (fs::perms::owner_exec | fs::perms::group_exec |
                       fs::perms::others_exec)) != fs::perms::none;
    };
    if (!word.empty() && word[0] == '/') {
      std::string norm = pathutil::normalize_posix_path(word);
      if (executable(norm)) return norm;
      return std::nullopt;
    }
    if (word.find('/') != std::string::npos) {
      return std::nullopt;  // relative path: depends on ambient cwd
    }
    for (const auto& dir : dirs) {
      std::string candidate = pathutil::normalize_posix_path(dir + "/" + word);
      if (executable(candidate)) return candidate;
    }
    return std::nullopt;
  };
}

ExecDecision evaluate_shell_allowlist(const shell::RawCommand& raw,
                                      const ExecPolicyConfig& config,
                                      const ApprovalStore& store,
                                      const PathResolver& path_resolver) {
  shell::CommandAnalysis analysis = shell::analyze(raw, config.analysis);
  if (analysis.is_failure()) {
    const auto& f = analysis.as_failure();
    CommandResult r{Verdict::RequireApproval, ExecReason::analysis_failure,
                    std::string(shell::failure_reason_name(f.reason)) + " at byte " +
                        std::to_string(f.location)};
    return to_decision(r);
  }
  Evaluator ev(config, store, path_resolver);
  return to_decision(ev.eval_chain(analysis.as_chain(), 0));
}

ExecDecision evaluate_argv(const std::vector<std::string>& argv,
                           const ExecPolicyConfig& config,
                           const ApprovalStore& store,
                           const PathResolver& path_resolver) {
  if (argv.empty()) throw std::invalid_argument("empty argv");
  shell::SimpleCommand cmd;
  cmd.argv = argv;
  Evaluator ev(config, store, path_resolver);
  return to_decision(ev.eval_command(cmd, 0));
}

void record_approval(ApprovalStore& store, const std::string& identity, Scope scope,
                     ApprovalOrigin origin, std::int64_t now,
                     const std::set<std::string>& multiplexer_names) {
  store.insert(identity, ApprovalState{scope, now, origin}, multiplexer_names);
}

}  // namespace guardkit::exec
