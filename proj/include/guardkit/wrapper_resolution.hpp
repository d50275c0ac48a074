#pragma once

#include <set>
#include <string>
#include <variant>
#include <vector>

#include "guardkit/shell_analysis.hpp"

namespace guardkit::wrappers {

struct NotWrapper {};

struct Blocked {
  std::string reason;
};

struct Unwrapped {
  shell::SimpleCommand inner;
  std::vector<std::string> wrapper_chain;  // wrapper basenames, outermost first
};

class WrapperResolution {
 public:
  static WrapperResolution not_wrapper() { return WrapperResolution(NotWrapper{}); }
  static WrapperResolution blocked(std::string reason) {
    return WrapperResolution(Blocked{std::move(reason)});
  }
  static WrapperResolution unwrapped(shell::SimpleCommand inner,
                                     std::vector<std::string> chain) {
    return WrapperResolution(Unwrapped{std::move(inner), std::move(chain)});
  }

  bool is_not_wrapper() const { return std::holds_alternative<NotWrapper>(kind_); }
  bool is_blocked() const { return std::holds_alternative<Blocked>(kind_); }
  bool is_unwrapped() const { return std::holds_alternative<Unwrapped>(kind_); }
  const Blocked& as_blocked() const { return std::get<Blocked>(kind_); }
  const Unwrapped& as_unwrapped() const { return std::get<Unwrapped>(kind_); }

 private:
  template <typename T>
  explicit WrapperResolution(T v) : kind_(std::move(v)) {}
  std::variant<NotWrapper, Blocked, Unwrapped> kind_;
};

// Path-stripping basename; "/usr/bin/env" and "env" compare equal.
std::string executable_basename(const std::string& word);

std::set<std::string> default_shell_applets();      // {sh, ash, bash, hush}
std::set<std::string> default_multiplexer_names();  // {busybox, toybox}

// Unwraps the dispatch wrappers env, nice and nohup, consuming only their
// documented minimal option forms (env: NAME=VALUE, -i, -u NAME; nice: -n N;
// nohup: nothing). Any other wrapper option fails closed.
WrapperResolution unwrap_known_wrappers(const shell::SimpleCommand& cmd);

// Resolves busybox/toybox applet dispatch. Shell applets unwrap (the caller
// must re-analyze any -c payload); every other applet is blocked so that no
// allowlist identity can ever be derived from a multiplexer invocation.
WrapperResolution unwrap_shell_multiplexer(
    const shell::SimpleCommand& cmd,
    const std::set<std::string>& shell_applets = default_shell_applets(),
    const std::set<std::string>& multiplexer_names = default_multiplexer_names());

}  // namespace guardkit::wrappers
