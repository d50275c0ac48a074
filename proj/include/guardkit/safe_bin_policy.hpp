#pragma once

#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "guardkit/shell_analysis.hpp"

namespace guardkit::safebin {

enum class PositionalPolicy { any, none, files_only };

struct SafeBinProfile {
  std::string binary;  // basename
  std::set<std::string> allowed_long_flags;   // canonical, "--"-prefixed, no '='
  std::set<std::string> denied_long_flags;
  std::set<char> allowed_short_flags;
  std::set<char> value_taking_short_flags;  // short flags with attached values (-n5)
  PositionalPolicy positional_policy = PositionalPolicy::any;
};

struct Canonical {
  std::string flag;
  std::optional<std::string> inline_value;
};
struct Unknown {};
struct Ambiguous {
  std::vector<std::string> candidates;  // sorted
};

class FlagResolution {
 public:
  static FlagResolution canonical(std::string flag, std::optional<std::string> value) {
    return FlagResolution(Canonical{std::move(flag), std::move(value)});
  }
  static FlagResolution unknown() { return FlagResolution(Unknown{}); }
  static FlagResolution ambiguous(std::vector<std::string> candidates) {
    return FlagResolution(Ambiguous{std::move(candidates)});
  }

  bool is_canonical() const { return std::holds_alternative<Canonical>(v_); }
  bool is_unknown() const { return std::holds_alternative<Unknown>(v_); }
  bool is_ambiguous() const { return std::holds_alternative<Ambiguous>(v_); }
  const Canonical& as_canonical() const { return std::get<Canonical>(v_); }
  const Ambiguous& as_ambiguous() const { return std::get<Ambiguous>(v_); }

 private:
  template <typename T>
  explicit FlagResolution(T v) : v_(std::move(v)) {}
  std::variant<Canonical, Unknown, Ambiguous> v_;
};

enum class TokenDecision { permitted, denied, analysis_failure };

const char* token_decision_name(TokenDecision d);

// GNU-style long-option canonicalization: exact match wins, then unambiguous
// strict prefixes of length >= 3 after "--". Shorter prefixes are Unknown.
// Throws std::invalid_argument unless token starts with "--" and != "--".
FlagResolution resolve_canonical_long_flag(const std::string& token,
                                           const SafeBinProfile& profile);

// Canonicalize first; unknown or ambiguous tokens fail analysis before the
// denied set is consulted. There is no implicit-permit fall-through.
TokenDecision consume_long_option_token(const std::string& token,
                                        const SafeBinProfile& profile);

// Evaluates a full argv against the profile. "--" ends option processing.
// Denied dominates analysis_failure dominates permitted.
// Throws std::invalid_argument if argv[0] does not match profile.binary.
TokenDecision evaluate_safe_bin(const shell::SimpleCommand& cmd,
                                const SafeBinProfile& profile);

// Shipped profiles for common safe utilities (sort, grep, wc, head, tail,
// cat). Best-effort data; operator policy may replace or extend them.
std::vector<SafeBinProfile> default_profiles();

}  // namespace guardkit::safebin
