#include "nullgc/nullify.hpp"

#include <algorithm>
#include <ostream>
#include <set>
#include <utility>

#include "nullgc/grammar.hpp"

namespace nullgc {
namespace {

// Sharing lookup at a point: the stored language with its orientation flag.
std::pair<Lang, bool> storedShare(const AnalysisBundle& b, ProgramPoint pt,
                                  const std::string& from,
                                  const std::string& to) {
  const auto& env = b.share.sharingAt[pt];
  bool flip = !(from <= to);
  auto it = env.find(flip ? std::make_pair(to, from)
                          : std::make_pair(from, to));
  if (it == env.end()) return {lEmpty(), false};
  return {it->second, flip};
}

}  // namespace

const Nfa& liveMachine(AnalysisBundle& b, ProgramPoint pt,
                       const std::string& v) {
  static const Nfa kEmptyNfa = nfaEmpty();
  const auto& env = b.live.liveAt[pt];
  auto it = env.find(v);
  if (it == env.end()) return kEmptyNfa;
  auto cached = b.liveFwd.find(it->second.get());
  if (cached == b.liveFwd.end())
    cached = b.liveFwd
                 .emplace(it->second.get(),
                          simplify(toNfa(b.live.system, it->second)))
                 .first;
  return cached->second;
}

namespace {

bool pureForward(const Path& p) {
  for (Sym s : p.syms)
    if (!isForward(s)) return false;
  return true;
}

}  // namespace

bool operator==(const NullStmt& a, const NullStmt& b) {
  return a.var == b.var && a.path == b.path;
}

std::ostream& operator<<(std::ostream& os, const NullStmt& s) {
  return os << s.var << "." << show(s.path);
}

AnalysisBundle analyzeAll(const ScopedProgram& sp) {
  AnalysisBundle b;
  b.sp = sp;
  b.live = analyzeLiveness(sp);
  b.share = analyzeSharing(sp);
  b.avail = analyzeAvail(sp);
  return b;
}

Nfa nodeAliases(AnalysisBundle& b, ProgramPoint pt, const std::string& v,
                const Path& alpha, const std::string& u) {
  auto [lang, flip] = storedShare(b, pt, u, v);
  bool diag = u == v;
  auto nodeKey = std::make_tuple(lang.get(), flip, diag, alpha);
  auto hit = b.aliasNode.find(nodeKey);
  if (hit != b.aliasNode.end()) return hit->second;

  auto baseKey = std::make_tuple(lang.get(), flip, diag);
  auto base = b.aliasBase.find(baseKey);
  if (base == b.aliasBase.end()) {
    Lang oriented = flip ? lReverse(lang) : lang;
    Nfa m = nfaIntersect(reductClosure(toNfa(b.share.system, oriented)),
                         nfaCanonicalShape());
    if (diag) m = nfaIntersect(m, nfaMixedOrEps());
    base = b.aliasBase.emplace(baseKey, std::move(m)).first;
  }
  Nfa out = simplify(nfaConcat(base->second, nfaWord(alpha)));
  b.aliasNode.emplace(nodeKey, out);
  return out;
}

Nfa linkAliases(AnalysisBundle& b, ProgramPoint pt, const std::string& v,
                const Path& alpha, const std::string& u) {
  if (alpha.isEps()) return u == v ? nfaEpsilon() : nfaEmpty();
  Path parent = alpha;
  Sym last = parent.syms.back();
  parent.syms.pop_back();
  Path step;
  step.syms.push_back(last);
  return nfaConcat(nodeAliases(b, pt, v, parent, u), nfaWord(step));
}

bool isSafe(AnalysisBundle& b, ProgramPoint pt, const std::string& v,
            const Path& alpha) {
  if (alpha.isEps()) return nfaIsEmpty(liveMachine(b, pt, v));
  for (const std::string& u : b.sp.visible[pt]) {
    const Nfa& live = liveMachine(b, pt, u);
    if (nfaIsEmpty(live)) continue;
    Nfa alias = linkAliases(b, pt, v, alpha, u);
    if (nfaIsEmpty(alias)) continue;
    if (!nfaIntersectEmpty(nfaConcat(alias, nfaForwardUniverse()), live))
      return false;
  }
  return true;
}

namespace {

using Marks = std::set<std::pair<std::string, Path>>;

bool anyPrefixMarked(const Marks& marks, const std::string& v,
                     const Path& alpha) {
  Path prefix;
  if (marks.count({v, prefix})) return true;
  for (Sym s : alpha.syms) {
    prefix.syms.push_back(s);
    if (marks.count({v, prefix})) return true;
  }
  return false;
}

class Planner {
 public:
  Planner(AnalysisBundle& b, Plan& plan, bool heapOk)
      : b_(b), plan_(plan), heapOk_(heapOk) {}

  void walk(const Expr& e, bool eligible, Marks& marks) {
    if (eligible) scanPoint(e.point, marks);
    switch (e.kind) {
      case ExprKind::If: {
        walk(e.kids[0], eligible, marks);
        Marks thenMarks = marks;
        Marks elseMarks = marks;
        walk(e.kids[1], eligible, thenMarks);
        walk(e.kids[2], eligible, elseMarks);
        Marks join;
        for (const auto& m : thenMarks)
          if (elseMarks.count(m)) join.insert(m);
        marks = std::move(join);
        return;
      }
      case ExprKind::Cons:
      case ExprKind::Prim:
      case ExprKind::Call:
        // Only the first operand runs with the surrounding environment still
        // fully described by the analyses at its points; later operands are
        // not planning sites.
        for (size_t i = 0; i < e.kids.size(); ++i)
          walk(e.kids[i], eligible && i == 0, marks);
        return;
      default:
        for (const Expr& k : e.kids) walk(k, eligible, marks);
        return;
    }
  }

 private:
  void scanPoint(ProgramPoint pt, Marks& marks) {
    struct Cand {
      Path alpha;
      std::string var;
      bool operator<(const Cand& o) const {
        if (alpha != o.alpha) return alpha < o.alpha;  // shortlex
        return var < o.var;
      }
    };
    std::vector<Cand> cands;
    for (const std::string& v : b_.sp.visible[pt]) {
      cands.push_back({Path{}, v});
      if (!heapOk_) continue;
      auto it = b_.avail.availAt[pt].find(v);
      if (it == b_.avail.availAt[pt].end()) continue;
      for (const Path& alpha : it->second) {
        if (!pureForward(alpha)) continue;
        for (Sym s : {Sym::Car, Sym::Cdr}) {
          Path link = alpha;
          link.syms.push_back(s);
          cands.push_back({link, v});
        }
      }
    }
    std::sort(cands.begin(), cands.end());

    std::vector<NullStmt> emitted;
    for (const Cand& c : cands) {
      if (anyPrefixMarked(marks, c.var, c.alpha)) continue;
      if (!isSafe(b_, pt, c.var, c.alpha)) continue;
      emitted.push_back({c.var, c.alpha});
      marks.insert({c.var, c.alpha});
      if (!c.alpha.isEps())
        for (const std::string& u : b_.sp.visible[pt])
          for (const Path& w : nfaEnumerate(
                   linkAliases(b_, pt, c.var, c.alpha, u), 6, 64))
            marks.insert({u, w});
    }
    if (emitted.empty()) return;

    // Execution order: longest link first, then path, then variable.
    std::sort(emitted.begin(), emitted.end(),
              [](const NullStmt& a, const NullStmt& b) {
                if (a.path.size() != b.path.size())
                  return a.path.size() > b.path.size();
                if (a.path != b.path) return a.path < b.path;
                return a.var < b.var;
              });
    plan_.at[pt] = std::move(emitted);
  }

  AnalysisBundle& b_;
  Plan& plan_;
  bool heapOk_;
};

}  // namespace

Plan planNullifications(AnalysisBundle& b) {
  Plan plan;
  // Inside a function the alias check only sees the callee's own frame, so a
  // link that looks unshared there may still be held by a caller variable.
  // Function bodies therefore get root clears only; links are severed in the
  // program body, where every live frame is the visible one.
  Planner defPlanner(b, plan, false);
  for (const FunctionDef& def : b.sp.program.defs) {
    Marks marks;
    defPlanner.walk(def.body, true, marks);
  }
  Planner bodyPlanner(b, plan, true);
  Marks marks;
  bodyPlanner.walk(b.sp.program.body, true, marks);
  return plan;
}

namespace {

class Applier {
 public:
  // Inserted nodes receive ids above the original point count, in blocks
  // laid out in ascending plan-point order regardless of nesting.
  Applier(const Plan& plan, int firstFresh) : plan_(plan), next_(firstFresh) {
    for (const auto& [pt, stmts] : plan_.at) {
      blockNext_[pt] = next_;
      int size = 1;  // the begin node
      for (const NullStmt& s : stmts) size += int(s.path.size()) + 1;
      for (int i = 0; i < size; ++i) attribution.push_back(pt);
      next_ += size;
    }
  }

  Expr transform(const Expr& e) {
    Expr n;
    n.kind = e.kind;
    n.point = e.point;
    n.num = e.num;
    n.isBool = e.isBool;
    n.name = e.name;
    for (const Expr& k : e.kids) n.kids.push_back(transform(k));

    auto it = plan_.at.find(e.point);
    if (it == plan_.at.end()) return n;

    Expr block;
    block.kind = ExprKind::Begin;
    block.point = fresh(e.point);
    for (const NullStmt& s : it->second)
      block.kids.push_back(makeStmt(s, e.point));
    block.kids.push_back(std::move(n));
    return block;
  }

  int pointCount() const { return next_; }
  std::vector<ProgramPoint> attribution;

 private:
  int fresh(ProgramPoint origin) { return blockNext_[origin]++; }

  Expr makeStmt(const NullStmt& s, ProgramPoint origin) {
    Expr stmt;
    if (s.path.isEps()) {
      stmt.kind = ExprKind::SetRoot;
      stmt.point = fresh(origin);
      stmt.name = s.var;
      return stmt;
    }
    Path walkPath = s.path;
    Sym last = walkPath.syms.back();
    walkPath.syms.pop_back();
    stmt.kind = last == Sym::Car ? ExprKind::SetCar : ExprKind::SetCdr;
    stmt.point = fresh(origin);
    stmt.kids.push_back(makeTarget(s.var, walkPath, origin));
    return stmt;
  }

  // Selector chain reading v's node along the given path; the first path
  // symbol is the innermost selector.
  Expr makeTarget(const std::string& v, const Path& path,
                  ProgramPoint origin) {
    if (path.isEps()) {
      Expr var;
      var.kind = ExprKind::Var;
      var.point = fresh(origin);
      var.name = v;
      return var;
    }
    Path inner = path;
    Sym outer = inner.syms.back();
    inner.syms.pop_back();
    Expr sel;
    sel.kind = outer == Sym::Car ? ExprKind::Car : ExprKind::Cdr;
    sel.point = fresh(origin);
    sel.kids.push_back(makeTarget(v, inner, origin));
    return sel;
  }

  const Plan& plan_;
  int next_;
  std::map<ProgramPoint, int> blockNext_;
};

}  // namespace

TransformResult applyPlan(const ScopedProgram& sp, const Plan& plan) {
  TransformResult out;
  out.firstFresh = sp.program.pointCount;
  Applier app(plan, out.firstFresh);
  for (const FunctionDef& def : sp.program.defs) {
    FunctionDef nd;
    nd.name = def.name;
    nd.params = def.params;
    nd.body = app.transform(def.body);
    out.program.defs.push_back(std::move(nd));
  }
  out.program.body = app.transform(sp.program.body);
  out.program.pointCount = app.pointCount();
  out.attribution = std::move(app.attribution);
  return out;
}

}  // namespace nullgc
