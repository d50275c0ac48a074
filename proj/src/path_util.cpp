#include "guardkit/path_util.hpp"

#include <vector>

namespace guardkit::pathutil {

std::string normalize_posix_path(const std::string& path) {
  const bool absolute = !path.empty() && path[0] == '/';
  std::vector<std::string> stack;
  std::size_t i = 0;
  while (i < path.size()) {
    while (i < path.size() && path[i] == '/') i++;
    std::size_t j = i;
    while (j < path.size() && path[j] != '/') j++;
    if (j > i) {
      std::string seg = path.substr(i, j - i);
      if (seg == ".") {
        // drop
      } else if (seg == "..") {
        if (!stack.empty() && stack.back() != "..") {
          stack.pop_back();
        } else if (!absolute) {
          stack.push_back("..");
        }
        // ".." at the root collapses to the root
      } else {
        stack.push_back(std::move(seg));
      }
    }
    i = j;
  }
  std::string out;
  if (absolute) out = "/";
  for (std::size_t k = 0; k < stack.size(); k++) {
    if (k > 0) out.push_back('/');
    out += stack[k];
  }
  if (out.empty()) out = absolute ? "/" : ".";
  return out;
}

bool is_path_ancestor(const std::string& ancestor, const std::string& path) {
  if (ancestor == path) return false;
  if (ancestor == "/") return !path.empty() && path[0] == '/';
  return path.size() > ancestor.size() + 1 &&
         path.compare(0, ancestor.size(), ancestor) == 0 &&
         path[ancestor.size()] == '/';
}

}  // namespace guardkit::pathutil
