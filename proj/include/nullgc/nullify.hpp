#pragma once

#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "nullgc/ast.hpp"
#include "nullgc/avail.hpp"
#include "nullgc/liveness.hpp"
#include "nullgc/nfa.hpp"
#include "nullgc/sharing.hpp"

namespace nullgc {

// All three static analyses over one program, plus memoized solved machines.
struct AnalysisBundle {
  ScopedProgram sp;
  LivenessResult live;
  SharingResult share;
  AvailResult avail;

  // Lazily populated caches keyed by language node identity.
  std::map<std::tuple<const LangNode*, bool, bool>, Nfa> aliasBase;
  std::map<std::tuple<const LangNode*, bool, bool, Path>, Nfa> aliasNode;
  std::map<const LangNode*, Nfa> liveFwd;
  std::map<const LangNode*, Nfa> shareClosure;
};

AnalysisBundle analyzeAll(const ScopedProgram& sp);

// Solved, simplified automaton for the forward live language of a variable at
// a point; the empty machine when the variable carries no liveness there.
const Nfa& liveMachine(AnalysisBundle& b, ProgramPoint pt,
                       const std::string& v);

// Forward spellings, rooted at visible variable u, that may denote the node
// reached from v along alpha at the given point.
Nfa nodeAliases(AnalysisBundle& b, ProgramPoint pt, const std::string& v,
                const Path& alpha, const std::string& u);

// Forward spellings, rooted at u, of links that may coincide with the link
// written by nullifying v.alpha. For alpha = e the link is v's root binding,
// whose only alias is v itself.
Nfa linkAliases(AnalysisBundle& b, ProgramPoint pt, const std::string& v,
                const Path& alpha, const std::string& u);

// True when writing nil over the link v.alpha just before the point executes
// cannot sever any path the rest of the run may still traverse.
bool isSafe(AnalysisBundle& b, ProgramPoint pt, const std::string& v,
            const Path& alpha);

struct NullStmt {
  std::string var;
  Path path;  // full link path; empty means the root binding
};
bool operator==(const NullStmt& a, const NullStmt& b);
std::ostream& operator<<(std::ostream& os, const NullStmt& s);

// Statements to insert before each point, already in execution order.
struct Plan {
  std::map<ProgramPoint, std::vector<NullStmt>> at;
};

Plan planNullifications(AnalysisBundle& b);

struct TransformResult {
  Program program;
  int firstFresh = 0;  // equals the original program's point count
  // Inserted node ids map back to the plan point they belong to:
  // attribution[id - firstFresh] is the original point.
  std::vector<ProgramPoint> attribution;
};

TransformResult applyPlan(const ScopedProgram& sp, const Plan& plan);

}  // namespace nullgc
