#include "guardkit/gateway_policy.hpp"

#include <algorithm>
#include <cctype>

namespace guardkit::gateway {

namespace {

constexpr const char* kExecApprovalsPrefix = "system.execApprovals.";

std::string to_lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::optional<int> default_port_for(const std::string& scheme) {
  if (scheme == "ws") return 80;
  if (scheme == "wss") return 443;
  return std::nullopt;
}

}  // namespace

std::optional<CanonicalEndpoint> canonicalize_endpoint(const std::string& url) {
  std::size_t sep = url.find("://");
  if (sep == std::string::npos || sep == 0) return std::nullopt;
  std::string scheme = to_lower(url.substr(0, sep));
  for (char c : scheme) {
    if (std::isalnum(static_cast<unsigned char>(c)) == 0 && c != '+' && c != '-' && c != '.') {
      return std::nullopt;
    }
  }

  std::size_t auth_begin = sep + 3;
  std::size_t auth_end = url.find_first_of("/?#", auth_begin);
  std::string authority = url.substr(
      auth_begin, auth_end == std::string::npos ? std::string::npos : auth_end - auth_begin);
  if (authority.empty()) return std::nullopt;
  if (authority.find('@') != std::string::npos) return std::nullopt;

  std::string host;
  std::string port_text;
  if (authority[0] == '[') {
    std::size_t close = authority.find(']');
    if (close == std::string::npos) return std::nullopt;
    host = authority.substr(1, close - 1);
    if (close + 1 < authority.size()) {
      if (authority[close + 1] != ':') return std::nullopt;
      port_text = authority.substr(close + 2);
    }
  } else {
    std::size_t colon = authority.find(':');
    if (colon == std::string::npos) {
      host = authority;
    } else {
      host = authority.substr(0, colon);
      port_text = authority.substr(colon + 1);
    }
  }
  if (host.empty()) return std::nullopt;

  CanonicalEndpoint ep;
  ep.scheme = std::move(scheme);
  ep.host = to_lower(host);
  if (port_text.empty()) {
    auto def = default_port_for(ep.scheme);
    if (!def) return std::nullopt;
    ep.port = *def;
  } else {
    if (port_text.size() > 5 ||
        !std::all_of(port_text.begin(), port_text.end(), [](unsigned char c) {
          return std::isdigit(c) != 0;
        })) {
      return std::nullopt;
    }
    int p = std::stoi(port_text);
    if (p < 1 || p > 65535) return std::nullopt;
    ep.port = p;
  }
  return ep;
}

UrlDecision validate_gateway_url_override(const std::string& candidate,
                                          const GatewayEndpointPolicy& policy) {
  std::string trimmed = trim(candidate);
  if (trimmed.empty()) {
    return {UrlOutcome::no_override, "no override; configured endpoint is used"};
  }

  std::vector<CanonicalEndpoint> allowlist = {
      {"ws", "127.0.0.1", policy.port},
      {"ws", "::1", policy.port},
      {"ws", "localhost", policy.port},
  };
  if (policy.remote_url) {
    if (auto remote = canonicalize_endpoint(*policy.remote_url)) {
      allowlist.push_back(*remote);
    }
  }

  auto ep = canonicalize_endpoint(trimmed);
  if (!ep) {
    return {UrlOutcome::rejected, "unparsable gateway URL"};
  }
  for (const auto& allowed : allowlist) {
    if (*ep == allowed) {
      return {UrlOutcome::allowed, "matches gateway endpoint allowlist"};
    }
  }
  return {UrlOutcome::rejected, "not in gateway endpoint allowlist"};
}

const std::set<std::string>& default_dispatchable_methods() {
  static const std::set<std::string> kMethods = {
      "system.run",
      "system.which",
      "system.notify",
      "browser.proxy",
  };
  return kMethods;
}

MethodDecision gate_node_invoke_method(const std::string& method,
                                       const std::set<std::string>& extra_methods) {
  // Early return: approval-policy mutation is unreachable remotely, no matter
  // what the dispatch allowlist says.
  if (method.compare(0, std::char_traits<char>::length(kExecApprovalsPrefix),
                     kExecApprovalsPrefix) == 0) {
    return {false, "approval policy methods are not remotely dispatchable"};
  }
  if (default_dispatchable_methods().count(method) != 0 ||
      extra_methods.count(method) != 0) {
    return {true, "method in dispatch allowlist"};
  }
  return {false, "method not in dispatch allowlist"};
}

}  // namespace guardkit::gateway
