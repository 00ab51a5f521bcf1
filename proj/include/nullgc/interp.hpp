#pragma once

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "nullgc/ast.hpp"
#include "nullgc/path.hpp"

namespace nullgc {

// Pseudo program point for events that happen after the program body returns
// (the result and everything reachable from it count as dereferenced there).
constexpr ProgramPoint kExitPoint = -1;

// Stable identity of a heap link across runs: root edges are numbered by the
// order in which bindings were created, slot edges by the birth order of their
// cell. Two runs of structurally aligned programs (a program and its
// transformed version) agree on these numbers because the transform inserts no
// new bindings or allocations.
struct EdgeId {
  bool root = false;
  int id = 0;        // binding index (root) or cell birth index (slot)
  bool cdr = false;  // slot edges only
  auto operator<=>(const EdgeId&) const = default;
};

std::string show(const EdgeId& e);

struct Value {
  enum class Tag { Nil, Int, Bool, Cell } tag = Tag::Nil;
  long long num = 0;  // Int payload, or 0/1 for Bool
  int cell = -1;      // birth index for Cell

  // The edge whose dereference produced this value, when there is one. The
  // dereference event is recorded lazily, at the expression that inspects the
  // value, not at the read itself.
  bool hasProv = false;
  EdgeId prov{};

  bool isNil() const { return tag == Tag::Nil; }
  bool isCell() const { return tag == Tag::Cell; }
};

std::string show(const Value& v);

struct EvalError {
  ProgramPoint point = -1;
  std::string message;
};

struct DerefEvent {
  int step = 0;
  EdgeId edge{};
  ProgramPoint point = -1;
  int act = 0;  // activation (call-tree node) the dereference ran in
};

struct WriteEvent {
  int step = 0;
  EdgeId edge{};
  // Plan point the inserted statement belongs to (its begin block), so the
  // write can be matched against the untransformed run.
  ProgramPoint point = -1;
  bool oldNonNil = false;
};

struct BindEvent {
  int step = 0;
  std::string var;
  ProgramPoint point = -1;  // binder: the let or the call
  Value value{};            // initial value, provenance stripped
};

struct CellBirth {
  int step = 0;
  Value car{}, cdr{};  // initial slot values, provenance stripped
};

struct VisBind {
  std::string var;
  int loc = 0;  // binding index = root edge id
  Value value{};
};

// Recorded on entry to every expression evaluation.
struct VisitEvent {
  int step = 0;
  ProgramPoint point = -1;
  int act = 0;                   // activation (call-tree node) being visited
  std::vector<VisBind> visible;  // current frame, outermost first
  std::vector<Value> pending;    // partial cons/prim/call captures, all frames
  int reachCells = 0;            // cells reachable from every live root
};

struct RunResult {
  bool ok = false;
  EvalError error{};  // meaningful when !ok
  Value value{};
  int steps = 0;
  std::vector<CellBirth> cells;
  std::vector<std::pair<Value, Value>> finalSlots;  // post-run car/cdr
  std::vector<BindEvent> binds;
  std::vector<DerefEvent> derefs;
  std::vector<WriteEvent> writes;
  std::vector<VisitEvent> visits;  // exit visit (kExitPoint) recorded last
  std::vector<int> actParent;      // call tree; entry 0 is main with parent -1
};

RunResult evalProgram(const ScopedProgram& sp);
// For transformed programs: points >= firstFresh belong to inserted
// statements and their writes are attributed to attribution[point-firstFresh].
RunResult evalProgram(const ScopedProgram& sp, int firstFresh,
                      const std::vector<ProgramPoint>& attribution);

// Heap state as of the beginning of step `step` (all events with a smaller
// step applied). Since inserted statements only ever store NIL, a slot or
// root is its initial value until its first earlier write, NIL afterwards.
struct HeapView {
  const RunResult* run = nullptr;
  int step = 0;

  bool born(int cell) const;
  Value slot(int cell, bool cdr) const;
  bool bound(int loc) const;
  Value root(int loc) const;
};

HeapView viewAt(const RunResult& run, int step);

// Follows a plain forward path from a value; nullopt when the walk meets a
// non-cell before the path is exhausted.
std::optional<Value> walkPath(const HeapView& view, Value start,
                              const Path& alpha);

// Edges dereferenced strictly after the last visit of each visited point;
// the exit pseudo-point is always present and always empty.
std::map<ProgramPoint, std::set<EdgeId>> traceDerefs(const RunResult& run);

const VisitEvent* lastVisit(const RunResult& run, ProgramPoint p);

// Deep structural equality of two values over their runs' final heaps.
bool valuesEqual(const RunResult& a, Value va, const RunResult& b, Value vb);

struct ReachRow {
  ProgramPoint point = -1;
  int original = 0;
  int transformed = 0;
};

struct ReachStats {
  bool divergent = false;  // visit sequences over original points differ
  std::vector<ReachRow> rows;
};

// Last-visit reachable-cell counts per original program point, for a program
// and its transformed version. `originalPointCount` separates original ids
// from the transform's fresh ones.
ReachStats reachStats(const RunResult& p, const RunResult& q,
                      int originalPointCount);

// Memory graph at the last visit of a point, restricted to what the visible
// environment reaches; shaped like the usual box diagrams.
std::string dotMemoryGraph(const RunResult& run, ProgramPoint p);

}  // namespace nullgc
