#pragma once

#include <map>
#include <string>
#include <vector>

#include "nullgc/ast.hpp"
#include "nullgc/path.hpp"

namespace nullgc {

// Availability analysis: for every program point, the set of paths from each
// visible variable that the evaluation is guaranteed to have traversed (or
// is about to traverse) by the time control reaches that point. Availability
// is a must-analysis over finite path sets; no grammar is involved.
struct AvailResult {
  // Per point: visible variables mapped to their available path sets.
  // Variables with an empty set are omitted.
  std::vector<std::map<std::string, PathSet>> availAt;
  // Per point: the demand the context places on the value produced there.
  std::vector<PathSet> demandAt;
};

AvailResult analyzeAvail(const ScopedProgram& sp);

// Demand translation across one operator, from the result to argument i
// (1-based), and availability translation from argument i to the result.
// Exposed for direct inspection; only selector and constructor operators
// propagate anything.
PathSet availThrough(ExprKind op, int i, const PathSet& demand);
PathSet availBack(ExprKind op, int i, const PathSet& avail);

}  // namespace nullgc
