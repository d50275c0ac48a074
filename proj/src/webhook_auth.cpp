#include "guardkit/webhook_auth.hpp"

#include <openssl/crypto.h>
#include <openssl/hmac.h>

#include <array>
#include <cctype>
#include <cstdlib>
#include <stdexcept>
#include <vector>

namespace guardkit::webhook {

namespace {

constexpr std::size_t kMacLen = 32;

std::array<unsigned char, kMacLen> hmac_sha256(const std::string& key,
                                               const std::string& message) {
  std::array<unsigned char, kMacLen> mac{};
  unsigned int len = 0;
  HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()),
       reinterpret_cast<const unsigned char*>(message.data()), message.size(),
       mac.data(), &len);
  return mac;
}

std::optional<std::vector<unsigned char>> decode_hex(const std::string& hex) {
  if (hex.empty() || hex.size() % 2 != 0) return std::nullopt;
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  std::vector<unsigned char> out;
  out.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    int hi = nibble(hex[i]);
    int lo = nibble(hex[i + 1]);
    if (hi < 0 || lo < 0) return std::nullopt;
    out.push_back(static_cast<unsigned char>((hi << 4) | lo));
  }
  return out;
}

std::optional<std::int64_t> parse_epoch_seconds(const std::string& s) {
  if (s.empty()) return std::nullopt;
  std::size_t i = (s[0] == '-') ? 1 : 0;
  if (i >= s.size()) return std::nullopt;
  for (std::size_t k = i; k < s.size(); k++) {
    if (std::isdigit(static_cast<unsigned char>(s[k])) == 0) return std::nullopt;
  }
  errno = 0;
  char* end = nullptr;
  long long v = std::strtoll(s.c_str(), &end, 10);
  if (errno != 0 || end == nullptr || *end != '\0') return std::nullopt;
  return static_cast<std::int64_t>(v);
}

}  // namespace

const char* webhook_outcome_name(WebhookOutcome o) {
  switch (o) {
    case WebhookOutcome::authentic: return "authentic";
    case WebhookOutcome::bad_signature: return "bad_signature";
    case WebhookOutcome::stale_timestamp: return "stale_timestamp";
    case WebhookOutcome::malformed_header: return "malformed_header";
  }
  return "?";
}

std::string hmac_sha256_hex(const std::string& key, const std::string& message) {
  auto mac = hmac_sha256(key, message);
  static const char* kHex = "0123456789abcdef";
  std::string out;
  out.reserve(kMacLen * 2);
  for (unsigned char b : mac) {
    out.push_back(kHex[b >> 4]);
    out.push_back(kHex[b & 0x0f]);
  }
  return out;
}

WebhookDecision verify_webhook(const WebhookVerificationRequest& request,
                               std::int64_t now) {
  if (request.secret.empty()) {
    throw std::invalid_argument("webhook secret must be non-empty");
  }
  if (request.tolerance_seconds < 0) {
    throw std::invalid_argument("tolerance must be non-negative");
  }

  bool stale = false;
  std::string signed_payload;
  if (request.timestamp_header) {
    auto ts = parse_epoch_seconds(*request.timestamp_header);
    if (!ts) {
      return {WebhookOutcome::malformed_header, "non-numeric timestamp header"};
    }
    std::int64_t delta = now >= *ts ? now - *ts : *ts - now;
    stale = delta > request.tolerance_seconds;
    signed_payload = *request.timestamp_header + "." + request.body;
  } else {
    signed_payload = request.body;
  }

  auto provided = decode_hex(request.signature_header);
  if (!provided) {
    return {WebhookOutcome::malformed_header, "signature header is not hex"};
  }

  // The MAC is always computed so the stale path costs the same as the
  // signature path.
  auto expected = hmac_sha256(request.secret, signed_payload);
  bool match = provided->size() == expected.size() &&
               CRYPTO_memcmp(provided->data(), expected.data(), expected.size()) == 0;

  if (stale) {
    return {WebhookOutcome::stale_timestamp, "timestamp outside tolerance window"};
  }
  if (!match) {
    return {WebhookOutcome::bad_signature, "signature does not match payload"};
  }
  return {WebhookOutcome::authentic, "signature verified"};
}

}  // namespace guardkit::webhook
