#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "nullgc/ast.hpp"
#include "nullgc/lang.hpp"

namespace nullgc {

// May-sharing analysis. For every program point it approximates, for each
// pair of visible variables (a, b), the set of bar-paths leading from the
// cell bound to a to the cell bound to b through the heap.
struct SharingResult {
  LangSystem system;
  // Pairs are stored with a <= b; the language is oriented from a's cell to
  // b's cell (reverse it for the other direction). Pairs whose language is
  // syntactically empty are omitted.
  std::vector<std::map<std::pair<std::string, std::string>, Lang>> sharingAt;
};

SharingResult analyzeSharing(const ScopedProgram& sp);

}  // namespace nullgc
