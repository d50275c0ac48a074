#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace guardkit::skills {

struct ManifestEntry {
  std::string relative_path;  // normalized, '/'-separated, no ".." segment
  std::uint64_t size_bytes = 0;
  std::string digest;  // SHA-256, lowercase hex

  bool operator==(const ManifestEntry&) const = default;
};

// Content-hash manifest over a skill directory. Entries are sorted by path
// and unique; the manifest is a pure function of file paths and contents.
struct SkillManifest {
  std::vector<ManifestEntry> entries;

  bool operator==(const SkillManifest&) const = default;

  // "skill-manifest v1" header, then one "<digest> <size> <path>" line per
  // entry, LF-terminated.
  std::string serialize() const;
  static SkillManifest parse(const std::string& text);
  void save(const std::string& path) const;
  static SkillManifest load(const std::string& path);
};

enum class Indicator {
  high_entropy_blob,
  raw_ip_url,
  base64_command_block,
  unreadable,
};

const char* indicator_name(Indicator i);

struct Finding {
  std::string path;
  Indicator indicator;
  std::string detail;
};

struct IndicatorReport {
  std::vector<Finding> findings;  // sorted by path, canonical
};

enum class MismatchKind { added, removed, changed };

const char* mismatch_kind_name(MismatchKind k);

struct Mismatch {
  std::string path;
  MismatchKind kind;
};

struct VerifyResult {
  std::vector<Mismatch> mismatches;  // sorted by path

  bool intact() const { return mismatches.empty(); }
};

// Hashes every regular file under root with SHA-256. Symlinks are recorded by
// their link-target string, never followed. An unreadable file is a hard
// error; a partial manifest is worse than none.
SkillManifest build_manifest(const std::string& root);

// Set difference plus digest comparison against a freshly built manifest.
VerifyResult verify_manifest(const std::string& root, const SkillManifest& manifest);

// Byte-frequency Shannon entropy in bits/byte, over the whole buffer.
double shannon_entropy(const std::string& bytes);

// Scans for the documented dropper indicators: packed/encrypted blobs by
// entropy (files >= 4096 bytes), URLs with dotted-quad literal hosts, and long
// base64 runs that decode to shell download commands.
IndicatorReport scan_indicators(const std::string& root, double entropy_threshold = 7.9);

extern const double kDefaultEntropyThreshold;
extern const std::size_t kEntropyMinFileSize;

}  // namespace guardkit::skills
