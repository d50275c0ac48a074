#include "guardkit/identity_allowlist.hpp"

#include <algorithm>
#include <cctype>

namespace guardkit::identity {

namespace {

bool all_digits(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isdigit(c) != 0;
  });
}

}  // namespace

const char* match_source_name(MatchSource s) {
  return s == MatchSource::wildcard ? "wildcard" : "id";
}

const char* repair_outcome_name(RepairOutcome o) {
  switch (o) {
    case RepairOutcome::rewritten: return "rewritten";
    case RepairOutcome::passthrough: return "passthrough";
    case RepairOutcome::unresolved: return "unresolved";
  }
  return "?";
}

AllowlistMatch resolve_allowlist_identity(const std::vector<std::string>& allow_from,
                                          const SenderContext& sender) {
  for (const auto& entry : allow_from) {
    if (entry == "*") {
      return {true, entry, MatchSource::wildcard};
    }
  }
  for (const auto& entry : allow_from) {
    if (entry == sender.sender_id) {
      return {true, entry, MatchSource::id};
    }
  }
  return {};
}

RepairResult repair_allow_from_handles(const std::vector<std::string>& entries,
                                       const HandleLookup& lookup) {
  RepairResult result;
  result.repaired.reserve(entries.size());
  result.report.reserve(entries.size());
  for (const auto& entry : entries) {
    if (entry == "*" || all_digits(entry)) {
      result.repaired.push_back(entry);
      result.report.emplace_back(entry, RepairOutcome::passthrough);
      continue;
    }
    std::optional<std::string> id;
    try {
      id = lookup(entry);
    } catch (const std::exception&) {
      id = std::nullopt;  // transport failure: keep the entry, mark unresolved
    }
    if (id) {
      result.repaired.push_back(*id);
      result.report.emplace_back(entry, RepairOutcome::rewritten);
    } else {
      result.repaired.push_back(entry);
      result.report.emplace_back(entry, RepairOutcome::unresolved);
    }
  }
  return result;
}

}  // namespace guardkit::identity
