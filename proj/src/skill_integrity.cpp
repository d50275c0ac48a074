#include "guardkit/skill_integrity.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace guardkit::skills {

namespace {

namespace fs = std::filesystem;

const double kBase64DecodeBudget = 1 << 20;  // bytes decoded per scan run

std::string sha256_hex(const std::string& bytes) {
  std::array<unsigned char, 32> digest{};
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr);
  static const char* kHex = "0123456789abcdef";
  std::string out;
  out.reserve(64);
  for (unsigned char b : digest) {
    out.push_back(kHex[b >> 4]);
    out.push_back(kHex[b & 0x0f]);
  }
  return out;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("unreadable file: " + p.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw std::runtime_error("read failure: " + p.string());
  return buf.str();
}

std::string generic_relative(const fs::path& p, const fs::path& root) {
  return p.lexically_relative(root).generic_string();
}

bool looks_text(const std::string& bytes) {
  std::size_t limit = std::min<std::size_t>(bytes.size(), 8192);
  for (std::size_t i = 0; i < limit; i++) {
    if (bytes[i] == '\0') return false;
  }
  return true;
}

bool is_base64_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '+' || c == '/' || c == '=';
}

std::string decode_base64(const std::string& text) {
  auto value = [](char c) -> int {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    return -1;
  };
  std::string out;
  int acc = 0;
  int bits = 0;
  for (char c : text) {
    if (c == '=') break;
    int v = value(c);
    if (v < 0) break;
    acc = (acc << 6) | v;
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out.push_back(static_cast<char>((acc >> bits) & 0xff));
    }
  }
  return out;
}

// Dotted-quad host immediately after a URL scheme separator; each octet 0-255.
std::vector<std::string> find_raw_ip_urls(const std::string& text) {
  std::vector<std::string> hits;
  std::size_t pos = 0;
  while ((pos = text.find("://", pos)) != std::string::npos) {
    std::size_t scheme_begin = pos;
    while (scheme_begin > 0 &&
           (std::isalnum(static_cast<unsigned char>(text[scheme_begin - 1])) != 0 ||
            text[scheme_begin - 1] == '+' || text[scheme_begin - 1] == '-' ||
            text[scheme_begin - 1] == '.')) {
      scheme_begin--;
    }
    std::size_t host_begin = pos + 3;
    std::size_t i = host_begin;
    int octets = 0;
    bool valid = true;
    while (octets < 4 && valid) {
      std::size_t d = i;
      while (d < text.size() && d - i < 3 &&
             std::isdigit(static_cast<unsigned char>(text[d])) != 0) {
        d++;
      }
      if (d == i) {
        valid = false;
        break;
      }
      int v = std::stoi(text.substr(i, d - i));
      if (v > 255) {
        valid = false;
        break;
      }
      octets++;
      i = d;
      if (octets < 4) {
        if (i < text.size() && text[i] == '.') {
          i++;
        } else {
          valid = false;
        }
      }
    }
    // host must end at a boundary, not run into more dotted digits
    if (valid && i < text.size() &&
        (text[i] == '.' || std::isdigit(static_cast<unsigned char>(text[i])) != 0)) {
      valid = false;
    }
    if (valid && octets == 4 && scheme_begin < pos) {
      std::size_t url_end = i;
      while (url_end < text.size() &&
             std::isspace(static_cast<unsigned char>(text[url_end])) == 0 &&
             text[url_end] != '"' && text[url_end] != '\'' && text[url_end] != ')') {
        url_end++;
      }
      hits.push_back(text.substr(scheme_begin, url_end - scheme_begin));
    }
    pos += 3;
  }
  return hits;
}

void scan_file(const std::string& rel, const std::string& bytes, double threshold,
               double& decode_budget, std::vector<Finding>& findings) {
  if (bytes.size() >= kEntropyMinFileSize) {
    double h = shannon_entropy(bytes);
    if (h >= threshold) {
      std::ostringstream detail;
      detail.precision(3);
      detail << std::fixed << "entropy " << h << " bits/byte over " << bytes.size()
             << " bytes";
      findings.push_back({rel, Indicator::high_entropy_blob, detail.str()});
    }
  }
  if (!looks_text(bytes)) return;

  for (const auto& url : find_raw_ip_urls(bytes)) {
    findings.push_back({rel, Indicator::raw_ip_url, url});
  }

  std::size_t i = 0;
  while (i < bytes.size()) {
    if (!is_base64_char(bytes[i])) {
      i++;
      continue;
    }
    std::size_t j = i;
    while (j < bytes.size() && is_base64_char(bytes[j])) j++;
    std::size_t run = j - i;
    if (run >= 120 && decode_budget > 0) {
      std::string chunk = bytes.substr(i, std::min<std::size_t>(run, 1 << 16));
      decode_budget -= static_cast<double>(chunk.size());
      std::string decoded = decode_base64(chunk);
      if (decoded.find("sh -c") != std::string::npos ||
          decoded.find("curl ") != std::string::npos) {
        findings.push_back({rel, Indicator::base64_command_block,
                            "base64 run of " + std::to_string(run) +
                                " chars decodes to a shell download command"});
      }
    }
    i = j;
  }
}

}  // namespace

const double kDefaultEntropyThreshold = 7.9;
const std::size_t kEntropyMinFileSize = 4096;

const char* indicator_name(Indicator i) {
  switch (i) {
    case Indicator::high_entropy_blob: return "high_entropy_blob";
    case Indicator::raw_ip_url: return "raw_ip_url";
    case Indicator::base64_command_block: return "base64_command_block";
    case Indicator::unreadable: return "unreadable";
  }
  return "?";
}

const char* mismatch_kind_name(MismatchKind k) {
  switch (k) {
    case MismatchKind::added: return "added";
    case MismatchKind::removed: return "removed";
    case MismatchKind::changed: return "changed";
  }
  return "?";
}

double shannon_entropy(const std::string& bytes) {
  if (bytes.empty()) return 0.0;
  std::array<std::uint64_t, 256> counts{};
  for (unsigned char c : bytes) counts[c]++;
  const double n = static_cast<double>(bytes.size());
  double h = 0.0;
  for (std::uint64_t c : counts) {
    if (c == 0) continue;
    double p = static_cast<double>(c) / n;
    h -= p * std::log2(p);
  }
  return h;
}

std::string SkillManifest::serialize() const {
  std::ostringstream out;
  out << "skill-manifest v1\n";
  for (const auto& e : entries) {
    out << e.digest << " " << e.size_bytes << " " << e.relative_path << "\n";
  }
  return out.str();
}

SkillManifest SkillManifest::parse(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "skill-manifest v1") {
    throw std::runtime_error("skill manifest: bad header");
  }
  SkillManifest m;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::size_t sp1 = line.find(' ');
    std::size_t sp2 = sp1 == std::string::npos ? std::string::npos : line.find(' ', sp1 + 1);
    if (sp1 == std::string::npos || sp2 == std::string::npos) {
      throw std::runtime_error("skill manifest: malformed entry: " + line);
    }
    ManifestEntry e;
    e.digest = line.substr(0, sp1);
    e.size_bytes = std::stoull(line.substr(sp1 + 1, sp2 - sp1 - 1));
    e.relative_path = line.substr(sp2 + 1);
    if (e.digest.size() != 64 || e.relative_path.empty()) {
      throw std::runtime_error("skill manifest: malformed entry: " + line);
    }
    m.entries.push_back(std::move(e));
  }
  std::sort(m.entries.begin(), m.entries.end(),
            [](const ManifestEntry& a, const ManifestEntry& b) {
              return a.relative_path < b.relative_path;
            });
  for (std::size_t i = 1; i < m.entries.size(); i++) {
    if (m.entries[i - 1].relative_path == m.entries[i].relative_path) {
      throw std::runtime_error("skill manifest: duplicate path " +
                               m.entries[i].relative_path);
    }
  }
  return m;
}

void SkillManifest::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write manifest: " + path);
  out << serialize();
}

SkillManifest SkillManifest::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read manifest: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

SkillManifest build_manifest(const std::string& root) {
  fs::path base(root);
  if (!fs::is_directory(base)) {
    throw std::runtime_error("not a directory: " + root);
  }
  SkillManifest m;
  for (fs::recursive_directory_iterator it(base), end; it != end; ++it) {
    const fs::path& p = it->path();
    if (fs::is_symlink(fs::symlink_status(p))) {
      it.disable_recursion_pending();
      std::string target = fs::read_symlink(p).string();
      std::string tagged = std::string("symlink\0", 8) + target;
      m.entries.push_back({generic_relative(p, base),
                           static_cast<std::uint64_t>(target.size()),
                           sha256_hex(tagged)});
      continue;
    }
    if (!it->is_regular_file()) continue;
    std::string bytes = read_file(p);
    m.entries.push_back({generic_relative(p, base),
                         static_cast<std::uint64_t>(bytes.size()), sha256_hex(bytes)});
  }
  std::sort(m.entries.begin(), m.entries.end(),
            [](const ManifestEntry& a, const ManifestEntry& b) {
              return a.relative_path < b.relative_path;
            });
  return m;
}

VerifyResult verify_manifest(const std::string& root, const SkillManifest& manifest) {
  SkillManifest fresh = build_manifest(root);
  std::map<std::string, const ManifestEntry*> want;
  for (const auto& e : manifest.entries) want[e.relative_path] = &e;

  VerifyResult result;
  for (const auto& e : fresh.entries) {
    auto it = want.find(e.relative_path);
    if (it == want.end()) {
      result.mismatches.push_back({e.relative_path, MismatchKind::added});
    } else if (it->second->digest != e.digest || it->second->size_bytes != e.size_bytes) {
      result.mismatches.push_back({e.relative_path, MismatchKind::changed});
    }
  }
  std::map<std::string, bool> have;
  for (const auto& e : fresh.entries) have[e.relative_path] = true;
  for (const auto& e : manifest.entries) {
    if (have.find(e.relative_path) == have.end()) {
      result.mismatches.push_back({e.relative_path, MismatchKind::removed});
    }
  }
  std::sort(result.mismatches.begin(), result.mismatches.end(),
            [](const Mismatch& a, const Mismatch& b) { return a.path < b.path; });
  return result;
}

IndicatorReport scan_indicators(const std::string& root, double entropy_threshold) {
  fs::path base(root);
  if (!fs::is_directory(base)) {
    throw std::runtime_error("not a directory: " + root);
  }
  IndicatorReport report;
  double decode_budget = kBase64DecodeBudget;
  for (fs::recursive_directory_iterator it(base), end; it != end; ++it) {
    const fs::path& p = it->path();
    if (fs::is_symlink(fs::symlink_status(p))) {
      it.disable_recursion_pending();
      continue;
    }
    if (!it->is_regular_file()) continue;
    std::string rel = generic_relative(p, base);
    try {
      std::string bytes = read_file(p);
      scan_file(rel, bytes, entropy_threshold, decode_budget, report.findings);
    } catch (const std::exception&) {
      report.findings.push_back({rel, Indicator::unreadable, "unreadable"});
    }
  }
  std::sort(report.findings.begin(), report.findings.end(),
            [](const Finding& a, const Finding& b) {
              if (a.path != b.path) return a.path < b.path;
              return static_cast<int>(a.indicator) < static_cast<int>(b.indicator);
            });
  return report;
}

}  // namespace guardkit::skills
