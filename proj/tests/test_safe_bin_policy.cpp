#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "guardkit/safe_bin_policy.hpp"

using namespace guardkit::safebin;
using guardkit::shell::SimpleCommand;

namespace {

SimpleCommand cmd(std::vector<std::string> argv) {
  SimpleCommand c;
  c.argv = std::move(argv);
  return c;
}

SafeBinProfile sort_profile() {
  for (auto& p : default_profiles()) {
    if (p.binary == "sort") return p;
  }
  throw std::logic_error("no sort profile");
}

// Brute-force reference: scans the whole known set, no early exits.
// Mirrors the documented rule: exact match wins; otherwise collect strict
// prefixes; a unique abbreviation needs >= 3 chars after "--".
struct BruteResult {
  enum { canonical, unknown, ambiguous } kind;
  std::string flag;
  std::vector<std::string> candidates;
};

BruteResult brute_force_resolve(const std::string& token, const SafeBinProfile& p) {
  std::string name = token.substr(0, token.find('='));
  std::vector<std::string> known(p.allowed_long_flags.begin(), p.allowed_long_flags.end());
  known.insert(known.end(), p.denied_long_flags.begin(), p.denied_long_flags.end());
  std::sort(known.begin(), known.end());
  for (const auto& f : known) {
    if (f == name) return {BruteResult::canonical, f, {}};
  }
  std::vector<std::string> cands;
  for (const auto& f : known) {
    if (f.size() > name.size() && f.substr(0, name.size()) == name) cands.push_back(f);
  }
  if (cands.empty()) return {BruteResult::unknown, "", {}};
  if (cands.size() > 1) return {BruteResult::ambiguous, "", cands};
  if (name.size() < 2 + 3) return {BruteResult::unknown, "", {}};
  return {BruteResult::canonical, cands.front(), {}};
}

}  // namespace

TEST_CASE("prefix abbreviation resolves to the canonical flag") {
  auto p = sort_profile();
  auto r = resolve_canonical_long_flag("--compress-prog", p);
  REQUIRE(r.is_canonical());
  CHECK(r.as_canonical().flag == "--compress-program");
  CHECK_FALSE(r.as_canonical().inline_value.has_value());
}

TEST_CASE("exact match with inline value") {
  auto p = sort_profile();
  auto r = resolve_canonical_long_flag("--compress-program=gzip", p);
  REQUIRE(r.is_canonical());
  CHECK(r.as_canonical().flag == "--compress-program");
  CHECK(r.as_canonical().inline_value == "gzip");
}

TEST_CASE("ambiguous prefixes report every candidate") {
  SafeBinProfile p;
  p.binary = "demo";
  p.allowed_long_flags = {"--reverse", "--regex"};
  auto r = resolve_canonical_long_flag("--re", p);
  REQUIRE(r.is_ambiguous());
  CHECK(r.as_ambiguous().candidates ==
        std::vector<std::string>{"--regex", "--reverse"});
}

TEST_CASE("short unique abbreviations stay unknown") {
  SafeBinProfile p;
  p.binary = "demo";
  p.allowed_long_flags = {"--reverse"};
  CHECK(resolve_canonical_long_flag("--re", p).is_unknown());
  CHECK(resolve_canonical_long_flag("--rev", p).is_canonical());
}

TEST_CASE("exact match wins even when it prefixes another flag") {
  SafeBinProfile p;
  p.binary = "demo";
  p.allowed_long_flags = {"--all", "--almost-all"};
  auto r = resolve_canonical_long_flag("--all", p);
  REQUIRE(r.is_canonical());
  CHECK(r.as_canonical().flag == "--all");
}

TEST_CASE("precondition violations throw") {
  auto p = sort_profile();
  CHECK_THROWS_AS(resolve_canonical_long_flag("-u", p), std::invalid_argument);
  CHECK_THROWS_AS(resolve_canonical_long_flag("--", p), std::invalid_argument);
  CHECK_THROWS_AS(resolve_canonical_long_flag("plain", p), std::invalid_argument);
}

TEST_CASE("consume: no implicit permit fall-through") {
  auto p = sort_profile();
  CHECK(consume_long_option_token("--compress-prog=evil", p) == TokenDecision::denied);
  CHECK(consume_long_option_token("--reverse", p) == TokenDecision::permitted);
  CHECK(consume_long_option_token("--frobnicate", p) == TokenDecision::analysis_failure);
}

TEST_CASE("denied abbreviation closure over shipped profiles") {
  for (const auto& p : default_profiles()) {
    for (const auto& denied : p.denied_long_flags) {
      for (std::size_t len = 3; len + 2 < denied.size(); len++) {
        std::string prefix = denied.substr(0, 2 + len);
        auto d = consume_long_option_token(prefix, p);
        CHECK_MESSAGE(d != TokenDecision::permitted, "prefix ", prefix, " of ", denied,
                      " must never be permitted for ", p.binary);
      }
    }
  }
}

TEST_CASE("no implicit permit: random unknown tokens") {
  std::mt19937 rng(2024);
  auto profiles = default_profiles();
  const std::string chars = "abcdefghijklmnopqrstuvwxyz-";
  int checked = 0;
  for (int iter = 0; iter < 4000; iter++) {
    const auto& p = profiles[rng() % profiles.size()];
    std::string name = "--";
    int len = 1 + static_cast<int>(rng() % 12);
    for (int i = 0; i < len; i++) name.push_back(chars[rng() % chars.size()]);
    bool known_or_prefix = false;
    auto scan = [&](const std::set<std::string>& flags) {
      for (const auto& f : flags) {
        if (f == name || (f.size() > name.size() && f.compare(0, name.size(), name) == 0)) {
          known_or_prefix = true;
        }
      }
    };
    scan(p.allowed_long_flags);
    scan(p.denied_long_flags);
    if (known_or_prefix) continue;
    checked++;
    CHECK(consume_long_option_token(name, p) == TokenDecision::analysis_failure);
  }
  CHECK(checked > 3000);
}

TEST_CASE("equivalence with brute-force scan over randomized profiles") {
  std::mt19937 rng(55555);
  const std::vector<std::string> stems = {"compress", "reverse", "regex",  "random",
                                          "recursive", "color",  "count",  "check",
                                          "zero",      "key",    "field",  "quiet"};
  const std::vector<std::string> suffixes = {"", "-program", "-source", "-all",
                                             "-sort", "-case", "s"};
  for (int iter = 0; iter < 10000; iter++) {
    SafeBinProfile p;
    p.binary = "rand";
    int n_allowed = static_cast<int>(rng() % 6);
    int n_denied = static_cast<int>(rng() % 3);
    for (int i = 0; i < n_allowed; i++) {
      p.allowed_long_flags.insert("--" + stems[rng() % stems.size()] +
                                  suffixes[rng() % suffixes.size()]);
    }
    for (int i = 0; i < n_denied; i++) {
      std::string f = "--" + stems[rng() % stems.size()] + suffixes[rng() % suffixes.size()];
      if (p.allowed_long_flags.count(f) == 0) p.denied_long_flags.insert(f);
    }
    // token: a mangled prefix of a known flag, or random junk
    std::string token;
    std::vector<std::string> known(p.allowed_long_flags.begin(), p.allowed_long_flags.end());
    known.insert(known.end(), p.denied_long_flags.begin(), p.denied_long_flags.end());
    if (!known.empty() && rng() % 3 != 0) {
      const std::string& f = known[rng() % known.size()];
      token = f.substr(0, 2 + 1 + rng() % f.size());
      if (token.size() > f.size()) token = f;
    } else {
      token = "--" + stems[rng() % stems.size()];
    }
    if (rng() % 4 == 0) token += "=value";

    auto got = resolve_canonical_long_flag(token, p);
    auto want = brute_force_resolve(token, p);
    switch (want.kind) {
      case BruteResult::canonical:
        REQUIRE(got.is_canonical());
        CHECK(got.as_canonical().flag == want.flag);
        break;
      case BruteResult::unknown:
        CHECK(got.is_unknown());
        break;
      case BruteResult::ambiguous:
        REQUIRE(got.is_ambiguous());
        CHECK(got.as_ambiguous().candidates == want.candidates);
        break;
    }
  }
}

TEST_CASE("evaluate_safe_bin composes token checks over a full argv") {
  auto profiles = default_profiles();
  auto find = [&](const std::string& b) -> const SafeBinProfile& {
    for (const auto& p : profiles) {
      if (p.binary == b) return p;
    }
    throw std::logic_error("missing profile");
  };

  CHECK(evaluate_safe_bin(cmd({"wc", "-l", "notes.txt"}), find("wc")) ==
        TokenDecision::permitted);
  CHECK(evaluate_safe_bin(cmd({"sort", "-u", "--compress-prog", "x"}), find("sort")) ==
        TokenDecision::denied);
  CHECK(evaluate_safe_bin(cmd({"grep", "-P", "pat", "file"}), find("grep")) ==
        TokenDecision::analysis_failure);
  // denied dominates a failure elsewhere in the argv
  CHECK(evaluate_safe_bin(cmd({"sort", "--frobnicate", "--compress-prog=x"}), find("sort")) ==
        TokenDecision::denied);
  // "--" ends option processing
  CHECK(evaluate_safe_bin(cmd({"sort", "--", "--compress-prog"}), find("sort")) ==
        TokenDecision::permitted);
  // value-taking short flag with attached value
  CHECK(evaluate_safe_bin(cmd({"head", "-n5", "file"}), find("head")) ==
        TokenDecision::permitted);
  // URL-looking positional under files_only
  CHECK(evaluate_safe_bin(cmd({"cat", "https://example.com/x"}), find("cat")) ==
        TokenDecision::analysis_failure);
  CHECK_THROWS_AS(evaluate_safe_bin(cmd({"sort", "-u"}), find("wc")), std::invalid_argument);
}

TEST_CASE("positional policies") {
  SafeBinProfile p;
  p.binary = "tool";
  p.allowed_short_flags = {'x'};
  p.positional_policy = PositionalPolicy::none;
  CHECK(evaluate_safe_bin(cmd({"tool", "-x"}), p) == TokenDecision::permitted);
  CHECK(evaluate_safe_bin(cmd({"tool", "arg"}), p) == TokenDecision::analysis_failure);
  p.positional_policy = PositionalPolicy::any;
  CHECK(evaluate_safe_bin(cmd({"tool", "https://x"}), p) == TokenDecision::permitted);
}
