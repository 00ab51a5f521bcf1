#pragma once

#include <string>
#include <vector>

#include "nullgc/ast.hpp"
#include "nullgc/interp.hpp"
#include "nullgc/nullify.hpp"

namespace nullgc {

// Deterministic, well-scoped random program: a handful of list-recursive
// functions (always at least one, guarded by null?) plus a let chain that
// builds, shares, and consumes finite lists. Every generated program
// terminates and evaluates without exceptions by construction.
Program genProgram(unsigned seed, int sizeBound = 200);

struct OracleStats {
  long checks = 0;
  std::vector<std::string> violations;  // capped, human-readable

  void flag(const std::string& what);
  bool ok() const { return violations.empty(); }
};

// Every link dereferenced after a visit that the visible environment can
// spell is covered by the static live language at that point.
void oracleLiveness(AnalysisBundle& b, const RunResult& run, OracleStats& st);

// Every pair of forward paths meeting in one cell has its bipath accepted by
// the static sharing language of the variable pair.
void oracleSharing(AnalysisBundle& b, const RunResult& run, OracleStats& st);

// Every statically available forward path can be walked without meeting a
// non-cell before the path ends.
void oracleAvail(AnalysisBundle& b, const RunResult& run, OracleStats& st);

// Transformed-run checks: identical value and a clean finish, per-visit
// reachable-cell counts never above the original, and no inserted statement
// clears a link the original run still dereferences from that point on.
void oracleTransform(AnalysisBundle& b, const RunResult& p,
                     const TransformResult& tr, const RunResult& q,
                     OracleStats& values, OracleStats& reach,
                     OracleStats& writes);

struct SoundnessOutcome {
  bool ok = true;
  long totalChecks = 0;
  std::vector<std::string> violations;
};

// Runs all analyses, both runs, and every oracle over one program.
SoundnessOutcome checkProgram(const ScopedProgram& sp);

}  // namespace nullgc
