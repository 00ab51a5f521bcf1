#pragma once

#include <map>
#include <string>
#include <vector>

#include "nullgc/ast.hpp"
#include "nullgc/lang.hpp"

namespace nullgc {

// Heap liveness: for every program point, the set of access paths rooted at
// each visible variable that the rest of the computation may still follow,
// described as a language over the four selectors relative to the analysis'
// rule system (U@f/i and D@f/i call summaries, exit@f result demands, and
// pgm for the unknown consumer of the program value).
struct LivenessResult {
  LangSystem system;
  // Indexed by program point. liveAt[p] maps each visible variable with a
  // nonempty live language to that language; demandAt[p] is the demand the
  // context places on the value produced at p.
  std::vector<std::map<std::string, Lang>> liveAt;
  std::vector<Lang> demandAt;
};

LivenessResult analyzeLiveness(const ScopedProgram& sp);

}  // namespace nullgc
