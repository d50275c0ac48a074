#pragma once

#include <string>

namespace guardkit::pathutil {

// Collapses "." and ".." segments and duplicate separators in a POSIX path.
// ".." at the root stays at the root; a trailing slash is dropped except for
// "/" itself. Relative inputs normalize relative (leading ".." preserved).
std::string normalize_posix_path(const std::string& path);

// True iff `ancestor` is a strict path ancestor of `path` ("/" covers
// everything but itself). Both sides must be normalized.
bool is_path_ancestor(const std::string& ancestor, const std::string& path);

}  // namespace guardkit::pathutil
