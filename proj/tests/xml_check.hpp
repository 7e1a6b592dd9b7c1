#pragma once

#include <algorithm>
#include <string>
#include <vector>

// Balanced tags and quoted attributes; enough to catch broken markup.
inline bool well_formed_xml(std::string s) {
  if (s.rfind("<?xml", 0) == 0) s.erase(0, s.find("?>") + 2);
  std::vector<std::string> stack;
  std::size_t i = 0;
  bool root_seen = false;
  while ((i = s.find('<', i)) != std::string::npos) {
    const std::size_t end = s.find('>', i);
    if (end == std::string::npos) return false;
    std::string tag = s.substr(i + 1, end - i - 1);
    if (std::count(tag.begin(), tag.end(), '"') % 2 != 0) return false;
    if (!tag.empty() && tag[0] == '/') {
      if (stack.empty() || stack.back() != tag.substr(1)) return false;
      stack.pop_back();
    } else {
      const bool self_closing = !tag.empty() && tag.back() == '/';
      const std::string name = tag.substr(0, tag.find_first_of(" /"));
      if (stack.empty() && root_seen) return false;
      root_seen = true;
      if (!self_closing) stack.push_back(name);
    }
    i = end + 1;
  }
  return root_seen && stack.empty();
}

