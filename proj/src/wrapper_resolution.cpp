#include "guardkit/wrapper_resolution.hpp"

#include <algorithm>
#include <cctype>

namespace guardkit::wrappers {

namespace {

bool is_env_assignment(const std::string& w) {
  std::size_t eq = w.find('=');
  if (eq == std::string::npos || eq == 0) return false;
  if (!(w[0] == '_' || std::isalpha(static_cast<unsigned char>(w[0])) != 0)) return false;
  for (std::size_t i = 1; i < eq; i++) {
    if (!(w[i] == '_' || std::isalnum(static_cast<unsigned char>(w[i])) != 0)) return false;
  }
  return true;
}

bool is_signed_integer(const std::string& w) {
  std::size_t i = (!w.empty() && (w[0] == '-' || w[0] == '+')) ? 1 : 0;
  if (i >= w.size()) return false;
  return std::all_of(w.begin() + static_cast<long>(i), w.end(), [](char c) {
    return std::isdigit(static_cast<unsigned char>(c)) != 0;
  });
}

// Slices cmd.argv[from..] into a new SimpleCommand, shifting expansion marks
// and appending any env assignments collected from an env wrapper.
shell::SimpleCommand slice_command(
    const shell::SimpleCommand& cmd, std::size_t from,
    std::vector<std::pair<std::string, std::string>> extra_env) {
  shell::SimpleCommand inner;
  inner.argv.assign(cmd.argv.begin() + static_cast<long>(from), cmd.argv.end());
  inner.env_assignments = cmd.env_assignments;
  for (auto& kv : extra_env) inner.env_assignments.push_back(std::move(kv));
  inner.redirections = cmd.redirections;
  for (std::size_t idx : cmd.expansion_words) {
    if (idx >= from) inner.expansion_words.push_back(idx - from);
  }
  return inner;
}

}  // namespace

std::string executable_basename(const std::string& word) {
  std::size_t slash = word.find_last_of('/');
  if (slash == std::string::npos) return word;
  return word.substr(slash + 1);
}

std::set<std::string> default_shell_applets() { return {"sh", "ash", "bash", "hush"}; }

std::set<std::string> default_multiplexer_names() { return {"busybox", "toybox"}; }

WrapperResolution unwrap_known_wrappers(const shell::SimpleCommand& cmd) {
  shell::SimpleCommand current = cmd;
  std::vector<std::string> chain;

  // Recursion depth is bounded by argv length: each pass consumes argv[0].
  for (;;) {
    if (current.argv.empty()) {
      return chain.empty() ? WrapperResolution::not_wrapper()
                           : WrapperResolution::blocked("wrapper with no command");
    }
    const std::string base = executable_basename(current.argv[0]);
    if (base != "env" && base != "nice" && base != "nohup") {
      if (chain.empty()) return WrapperResolution::not_wrapper();
      return WrapperResolution::unwrapped(std::move(current), std::move(chain));
    }
    chain.push_back(base);

    std::size_t i = 1;
    std::vector<std::pair<std::string, std::string>> collected_env;
    if (base == "env") {
      while (i < current.argv.size()) {
        const std::string& a = current.argv[i];
        if (is_env_assignment(a)) {
          std::size_t eq = a.find('=');
          collected_env.emplace_back(a.substr(0, eq), a.substr(eq + 1));
          i++;
        } else if (a == "-i") {
          i++;
        } else if (a == "-u") {
          if (i + 1 >= current.argv.size()) {
            return WrapperResolution::blocked("env -u without a name");
          }
          i += 2;
        } else if (!a.empty() && a[0] == '-') {
          return WrapperResolution::blocked("unrecognized env option: " + a);
        } else {
          break;
        }
      }
    } else if (base == "nice") {
      if (i < current.argv.size() && current.argv[i] == "-n") {
        if (i + 1 >= current.argv.size() || !is_signed_integer(current.argv[i + 1])) {
          return WrapperResolution::blocked("nice -n without an adjustment");
        }
        i += 2;
      } else if (i < current.argv.size() && !current.argv[i].empty() &&
                 current.argv[i][0] == '-') {
        return WrapperResolution::blocked("unrecognized nice option: " + current.argv[i]);
      }
    }
    // nohup consumes nothing beyond itself.

    if (i >= current.argv.size()) {
      return WrapperResolution::blocked("wrapper with no command");
    }
    current = slice_command(current, i, std::move(collected_env));
  }
}

WrapperResolution unwrap_shell_multiplexer(const shell::SimpleCommand& cmd,
                                           const std::set<std::string>& shell_applets,
                                           const std::set<std::string>& multiplexer_names) {
  if (cmd.argv.empty()) return WrapperResolution::not_wrapper();
  const std::string base = executable_basename(cmd.argv[0]);
  if (multiplexer_names.count(base) == 0) return WrapperResolution::not_wrapper();
  if (cmd.argv.size() < 2) {
    return WrapperResolution::blocked("multiplexer with no applet");
  }
  const std::string& applet = cmd.argv[1];
  if (shell_applets.count(applet) == 0) {
    return WrapperResolution::blocked("non-shell applet: " + applet);
  }
  return WrapperResolution::unwrapped(slice_command(cmd, 1, {}), {base});
}

}  // namespace guardkit::wrappers
