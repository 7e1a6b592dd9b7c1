#pragma once

#include <stdexcept>
#include <string>

namespace optlab::puzzles {

enum class PuzzleErrc { InvalidSize, InvalidInstance, BadSolution };

class PuzzleError : public std::runtime_error {
 public:
  PuzzleError(PuzzleErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  PuzzleErrc code() const noexcept { return code_; }

 private:
  PuzzleErrc code_;
};

inline std::string cell_name(const char* prefix, int a, int b) {
  return std::string(prefix) + "_" + std::to_string(a) + "_" + std::to_string(b);
}

}  // namespace optlab::puzzles
