#include "guardkit/safe_bin_policy.hpp"

#include <algorithm>
#include <stdexcept>

#include "guardkit/wrapper_resolution.hpp"

namespace guardkit::safebin {

namespace {

constexpr std::size_t kMinAbbrevLen = 3;  // after the "--" prefix

bool positional_ok(const std::string& token, PositionalPolicy policy) {
  switch (policy) {
    case PositionalPolicy::any:
      return true;
    case PositionalPolicy::none:
      return false;
    case PositionalPolicy::files_only:
      return token.find("://") == std::string::npos;
  }
  return false;
}

}  // namespace

const char* token_decision_name(TokenDecision d) {
  switch (d) {
    case TokenDecision::permitted: return "permitted";
    case TokenDecision::denied: return "denied";
    case TokenDecision::analysis_failure: return "analysis_failure";
  }
  return "?";
}

FlagResolution resolve_canonical_long_flag(const std::string& token,
                                           const SafeBinProfile& profile) {
  if (token.size() < 3 || token.compare(0, 2, "--") != 0) {
    throw std::invalid_argument("not a long-option token: " + token);
  }
  std::size_t eq = token.find('=');
  std::string name = token.substr(0, eq);
  std::optional<std::string> inline_value;
  if (eq != std::string::npos) inline_value = token.substr(eq + 1);

  auto known_has = [&](const std::string& f) {
    return profile.allowed_long_flags.count(f) != 0 ||
           profile.denied_long_flags.count(f) != 0;
  };
  if (known_has(name)) {
    return FlagResolution::canonical(name, std::move(inline_value));
  }
  std::vector<std::string> candidates;
  auto collect = [&](const std::set<std::string>& flags) {
    for (const auto& f : flags) {
      if (f.size() > name.size() && f.compare(0, name.size(), name) == 0) {
        candidates.push_back(f);
      }
    }
  };
  collect(profile.allowed_long_flags);
  collect(profile.denied_long_flags);
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  if (candidates.empty()) return FlagResolution::unknown();
  if (candidates.size() > 1) return FlagResolution::ambiguous(std::move(candidates));
  // A unique abbreviation is accepted only at >= kMinAbbrevLen chars after
  // "--"; shorter unique prefixes stay Unknown.
  if (name.size() - 2 < kMinAbbrevLen) return FlagResolution::unknown();
  return FlagResolution::canonical(candidates.front(), std::move(inline_value));
}

TokenDecision consume_long_option_token(const std::string& token,
                                        const SafeBinProfile& profile) {
  FlagResolution res = resolve_canonical_long_flag(token, profile);
  if (!res.is_canonical()) return TokenDecision::analysis_failure;
  const std::string& flag = res.as_canonical().flag;
  if (profile.denied_long_flags.count(flag) != 0) return TokenDecision::denied;
  if (profile.allowed_long_flags.count(flag) != 0) return TokenDecision::permitted;
  return TokenDecision::analysis_failure;
}

TokenDecision evaluate_safe_bin(const shell::SimpleCommand& cmd,
                                const SafeBinProfile& profile) {
  if (cmd.argv.empty() ||
      wrappers::executable_basename(cmd.argv[0]) != profile.binary) {
    throw std::invalid_argument("profile/binary mismatch");
  }
  bool any_denied = false;
  bool any_failure = false;
  bool options_done = false;
  auto note = [&](TokenDecision d) {
    if (d == TokenDecision::denied) any_denied = true;
    if (d == TokenDecision::analysis_failure) any_failure = true;
  };
  auto check_positional = [&](const std::string& t) {
    if (!positional_ok(t, profile.positional_policy)) any_failure = true;
  };

  for (std::size_t i = 1; i < cmd.argv.size(); i++) {
    const std::string& t = cmd.argv[i];
    if (options_done) {
      check_positional(t);
      continue;
    }
    if (t == "--") {
      options_done = true;
      continue;
    }
    if (t.size() > 2 && t.compare(0, 2, "--") == 0) {
      note(consume_long_option_token(t, profile));
      continue;
    }
    if (t.size() > 1 && t[0] == '-') {
      // Short cluster; a value-taking flag consumes the rest as its value.
      for (std::size_t j = 1; j < t.size(); j++) {
        char c = t[j];
        if (profile.allowed_short_flags.count(c) == 0) {
          any_failure = true;
          break;
        }
        if (profile.value_taking_short_flags.count(c) != 0) {
          if (j + 1 < t.size()) check_positional(t.substr(j + 1));
          break;
        }
      }
      continue;
    }
    check_positional(t);
  }

  if (any_denied) return TokenDecision::denied;
  if (any_failure) return TokenDecision::analysis_failure;
  return TokenDecision::permitted;
}

std::vector<SafeBinProfile> default_profiles() {
  std::vector<SafeBinProfile> out;

  SafeBinProfile sort;
  sort.binary = "sort";
  sort.allowed_long_flags = {"--reverse", "--unique", "--numeric-sort",
                             "--human-numeric-sort", "--ignore-case", "--stable",
                             "--check", "--zero-terminated", "--key",
                             "--field-separator", "--ignore-leading-blanks"};
  sort.denied_long_flags = {"--compress-program"};
  sort.allowed_short_flags = {'u', 'r', 'n', 'f', 'b', 'c', 'z', 's', 'h', 'k', 't'};
  sort.value_taking_short_flags = {'k', 't'};
  sort.positional_policy = PositionalPolicy::files_only;
  out.push_back(std::move(sort));

  SafeBinProfile grep;
  grep.binary = "grep";
  grep.allowed_long_flags = {"--ignore-case", "--line-number", "--count",
                             "--extended-regexp", "--fixed-strings", "--recursive",
                             "--word-regexp", "--invert-match",
                             "--files-with-matches", "--only-matching", "--quiet",
                             "--regexp", "--max-count"};
  grep.denied_long_flags = {};
  grep.allowed_short_flags = {'i', 'n', 'c', 'E', 'F', 'r', 'w', 'v',
                              'l', 'o', 'q', 'e', 'm', 'A', 'B', 'C', 'H', 'h'};
  grep.value_taking_short_flags = {'e', 'm', 'A', 'B', 'C'};
  grep.positional_policy = PositionalPolicy::files_only;
  out.push_back(std::move(grep));

  SafeBinProfile wc;
  wc.binary = "wc";
  wc.allowed_long_flags = {"--lines", "--bytes", "--words", "--chars",
                           "--max-line-length"};
  wc.allowed_short_flags = {'l', 'c', 'w', 'm', 'L'};
  wc.positional_policy = PositionalPolicy::files_only;
  out.push_back(std::move(wc));

  SafeBinProfile head;
  head.binary = "head";
  head.allowed_long_flags = {"--lines", "--bytes", "--quiet", "--verbose",
                             "--zero-terminated"};
  head.allowed_short_flags = {'n', 'c', 'q', 'v', 'z'};
  head.value_taking_short_flags = {'n', 'c'};
  head.positional_policy = PositionalPolicy::files_only;
  out.push_back(std::move(head));

  SafeBinProfile tail;
  tail.binary = "tail";
  tail.allowed_long_flags = {"--lines", "--bytes", "--quiet", "--verbose",
                             "--zero-terminated"};
  tail.allowed_short_flags = {'n', 'c', 'q', 'v', 'z'};
  tail.value_taking_short_flags = {'n', 'c'};
  tail.positional_policy = PositionalPolicy::files_only;
  out.push_back(std::move(tail));

  SafeBinProfile cat;
  cat.binary = "cat";
  cat.allowed_long_flags = {"--number", "--number-nonblank", "--squeeze-blank",
                            "--show-ends", "--show-tabs", "--show-all",
                            "--show-nonprinting"};
  cat.allowed_short_flags = {'n', 'b', 's', 'E', 'T', 'A', 'v', 'e', 't'};
  cat.positional_policy = PositionalPolicy::files_only;
  out.push_back(std::move(cat));

  return out;
}

}  // namespace guardkit::safebin
