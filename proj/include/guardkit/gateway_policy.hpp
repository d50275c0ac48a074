#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace guardkit::gateway {

struct GatewayEndpointPolicy {
  int port = 18789;                       // configured gateway port
  std::optional<std::string> remote_url;  // operator-configured remote endpoint
};

// Canonical endpoint key: equality is equality of all three fields.
struct CanonicalEndpoint {
  std::string scheme;  // lowercased
  std::string host;    // lowercased, brackets stripped for IPv6
  int port = 0;        // explicit, default-filled from scheme (ws 80, wss 443)

  bool operator==(const CanonicalEndpoint&) const = default;
};

// Parses scheme://host[:port][/...] into a canonical key. Userinfo, empty
// hosts, bad ports and schemes without a known default port (when the port is
// omitted) all fail.
std::optional<CanonicalEndpoint> canonicalize_endpoint(const std::string& url);

enum class UrlOutcome { allowed, no_override, rejected };

struct UrlDecision {
  UrlOutcome outcome = UrlOutcome::rejected;
  std::string reason;
};

// Validates a gateway URL override against the runtime allowlist: the three
// ws loopback variants at the configured port plus the operator-configured
// remote endpoint. Empty or whitespace candidates mean "no override" and are
// never rejected.
UrlDecision validate_gateway_url_override(const std::string& candidate,
                                          const GatewayEndpointPolicy& policy);

struct MethodDecision {
  bool dispatchable = false;
  std::string reason;
};

// Methods reachable over node.invoke. The system.execApprovals. prefix is an
// early-return guard checked before any allowlist and is not
// policy-overridable; approval policy must never be rewritable remotely.
MethodDecision gate_node_invoke_method(const std::string& method,
                                       const std::set<std::string>& extra_methods = {});

const std::set<std::string>& default_dispatchable_methods();

}  // namespace guardkit::gateway
