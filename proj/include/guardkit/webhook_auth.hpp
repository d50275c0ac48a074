#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace guardkit::webhook {

// Everything needed to verify one inbound webhook request. The type carries
// no source-address field: there is no representable loopback or proxy trust
// exception.
struct WebhookVerificationRequest {
  std::string body;              // exact transported bytes
  std::string signature_header;  // lowercase/uppercase hex MAC
  std::string secret;            // non-empty key bytes
  std::optional<std::string> timestamp_header;
  std::int64_t tolerance_seconds = 300;
};

enum class WebhookOutcome { authentic, bad_signature, stale_timestamp, malformed_header };

const char* webhook_outcome_name(WebhookOutcome o);

struct WebhookDecision {
  WebhookOutcome outcome = WebhookOutcome::bad_signature;
  std::string detail;
};

// HMAC-SHA256 over body, or over "<timestamp>.<body>" when a timestamp header
// is supplied; hex signature compared in constant time. The MAC is computed
// even for stale requests to keep timing uniform.
// Throws std::invalid_argument on an empty secret or negative tolerance.
WebhookDecision verify_webhook(const WebhookVerificationRequest& request,
                               std::int64_t now);

// Keyed-hash helper exposed for report tooling; returns lowercase hex.
std::string hmac_sha256_hex(const std::string& key, const std::string& message);

}  // namespace guardkit::webhook
