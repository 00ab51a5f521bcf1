#include "nullgc/gen.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "nullgc/grammar.hpp"

namespace nullgc {

namespace {

constexpr size_t kMaxViolations = 5;
constexpr int kSpellDepth = 8;   // longest forward spelling we enumerate
constexpr size_t kSpellCap = 64;  // spellings kept per variable

// ---------------------------------------------------------------------------
// Program generator

struct VarInfo {
  std::string name;
  char kind;      // 'I' scalar, 'L' list of scalars, 'P' pair of two lists
  int m0 = 0;     // lists: guaranteed minimum length; pairs: car component
  int m1 = 0;     // pairs: cdr component
};

struct Gen {
  std::mt19937 rng;
  int budget;
  int nodes = 0;
  std::vector<VarInfo> vars;
  bool hasMap = false, hasSum = false, hasLen = false, hasSel = false;
  bool calledRec = false;

  explicit Gen(unsigned seed, int sizeBound) : rng(seed), budget(sizeBound) {}

  int pick(int n) { return int(rng() % unsigned(n)); }

  std::string lit() { return std::to_string(pick(10)); }

  std::vector<int> ofKind(char k, int minLen = 0) const {
    std::vector<int> out;
    for (int i = 0; i < int(vars.size()); ++i)
      if (vars[i].kind == k && vars[i].m0 >= minLen) out.push_back(i);
    return out;
  }

  std::string intExpr() {
    auto ints = ofKind('I');
    int c = pick(10);
    if (c < 6 || ints.empty()) {
      nodes += 1;
      return lit();
    }
    nodes += 3;
    return "(prim " + vars[ints[size_t(pick(int(ints.size())))]].name + " " +
           lit() + ")";
  }

  std::string litList(int len) {
    std::string out = "nil";
    for (int i = 0; i < len; ++i) out = "(cons " + lit() + " " + out + ")";
    nodes += 2 * len + 1;
    return out;
  }

  const VarInfo& at(const std::vector<int>& idx) {
    return vars[idx[size_t(pick(int(idx.size())))]];
  }

  // One let initializer; appends the new variable's info to `vars`.
  std::string binder(const std::string& name) {
    auto lists = ofKind('L');
    auto full = ofKind('L', 1);
    auto pairs = ofKind('P');
    for (int attempt = 0; attempt < 16; ++attempt) {
      switch (pick(13)) {
        case 0: {
          int len = pick(4);
          std::string e = litList(len);
          vars.push_back({name, 'L', len, 0});
          return e;
        }
        case 1: {
          if (lists.empty()) break;
          const VarInfo v = at(lists);
          nodes += 1;
          vars.push_back({name, 'L', v.m0, 0});
          return v.name;
        }
        case 2: {
          if (lists.empty()) break;
          std::string head = intExpr();
          const VarInfo v = at(lists);
          nodes += 2;
          vars.push_back({name, 'L', v.m0 + 1, 0});
          return "(cons " + head + " " + v.name + ")";
        }
        case 3: {
          if (lists.empty()) break;
          const VarInfo a = at(lists);
          const VarInfo b = at(lists);
          nodes += 3;
          vars.push_back({name, 'P', a.m0, b.m0});
          return "(cons " + a.name + " " + b.name + ")";
        }
        case 4: {
          if (pairs.empty()) break;
          const VarInfo p = at(pairs);
          nodes += 2;
          vars.push_back({name, 'L', p.m0, 0});
          return "(car " + p.name + ")";
        }
        case 5: {
          if (pairs.empty()) break;
          const VarInfo p = at(pairs);
          nodes += 2;
          vars.push_back({name, 'L', p.m1, 0});
          return "(cdr " + p.name + ")";
        }
        case 6: {
          if (lists.empty()) break;
          const VarInfo a = at(lists);
          const VarInfo b = at(lists);
          nodes += 3;
          calledRec = true;
          vars.push_back({name, 'L', a.m0 + b.m0, 0});
          return "(fa " + a.name + " " + b.name + ")";
        }
        case 7: {
          if (!hasMap || lists.empty()) break;
          const VarInfo v = at(lists);
          nodes += 2;
          calledRec = true;
          vars.push_back({name, 'L', v.m0, 0});
          return "(fm " + v.name + ")";
        }
        case 8: {
          if (!hasSum || lists.empty()) break;
          const VarInfo v = at(lists);
          nodes += 2;
          calledRec = true;
          vars.push_back({name, 'I', 0, 0});
          return "(fs " + v.name + ")";
        }
        case 9: {
          if (!hasLen || lists.empty()) break;
          const VarInfo v = at(lists);
          nodes += 2;
          calledRec = true;
          vars.push_back({name, 'I', 0, 0});
          return "(fl " + v.name + ")";
        }
        case 10: {
          if (!hasSel || lists.empty()) break;
          const VarInfo v = at(lists);
          std::string fb = intExpr();
          nodes += 3;
          vars.push_back({name, 'I', 0, 0});
          return "(fp " + v.name + " " + fb + ")";
        }
        case 11: {
          if (lists.empty()) break;
          const VarInfo v = at(lists);
          int k = pick(3);
          std::string fb = litList(k);
          nodes += 5;
          vars.push_back(
              {name, 'L', std::min(k, std::max(v.m0 - 1, 0)), 0});
          return "(if (null? " + v.name + ") " + fb + " (cdr " + v.name +
                 "))";
        }
        case 12: {
          if (full.empty()) break;
          const VarInfo v = at(full);
          nodes += 2;
          vars.push_back({name, 'I', 0, 0});
          return "(car " + v.name + ")";
        }
      }
    }
    std::string e = intExpr();
    vars.push_back({name, 'I', 0, 0});
    return e;
  }

  std::string finalExpr() {
    auto lists = ofKind('L');
    auto full = ofKind('L', 1);
    auto pairs = ofKind('P');
    switch (pick(6)) {
      case 0:
        if (!lists.empty()) return at(lists).name;
        break;
      case 1:
        if (!full.empty()) return "(car " + at(full).name + ")";
        break;
      case 2:
        if (!pairs.empty()) return at(pairs).name;
        break;
      case 3:
        if (lists.size() >= 1) {
          calledRec = true;
          return "(fa " + at(lists).name + " " + at(lists).name + ")";
        }
        break;
      case 4:
        if (hasSum && !lists.empty()) {
          calledRec = true;
          return "(fs " + at(lists).name + ")";
        }
        break;
      default:
        break;
    }
    return intExpr();
  }

  std::string build() {
    std::ostringstream src;
    src << "(define (fa a b) (if (null? a) b (cons (car a) (fa (cdr a) "
           "b))))\n";
    nodes += 12;
    hasMap = pick(2) == 0;
    hasSum = pick(2) == 0;
    hasLen = pick(2) == 0;
    hasSel = pick(2) == 0;
    if (hasMap) {
      src << "(define (fm a) (if (null? a) nil (cons (prim (car a) "
          << lit() << ") (fm (cdr a)))))\n";
      nodes += 13;
    }
    if (hasSum) {
      src << "(define (fs a) (if (null? a) " << lit()
          << " (prim (car a) (fs (cdr a)))))\n";
      nodes += 11;
    }
    if (hasLen) {
      src << "(define (fl a) (if (null? a) 0 (prim 1 (fl (cdr a)))))\n";
      nodes += 10;
    }
    if (hasSel) {
      src << "(define (fp a b) (if (pair? a) (car a) b))\n";
      nodes += 8;
    }

    std::vector<std::pair<std::string, std::string>> lets;
    auto addLet = [&](const std::string& init) {
      lets.emplace_back(vars.back().name, init);
      nodes += 2;
    };
    vars.push_back({"v1", 'L', 1 + pick(3), 0});
    lets.emplace_back("v1", litList(vars.back().m0));
    nodes += 2;
    vars.push_back({"v2", 'L', pick(4), 0});
    lets.emplace_back("v2", litList(vars.back().m0));
    nodes += 2;
    int extra = 1 + pick(5);
    for (int i = 0; i < extra && nodes < budget - 40; ++i) {
      std::string name = "v" + std::to_string(lets.size() + 1);
      std::string init = binder(name);
      addLet(init);
    }
    if (!calledRec) {
      std::string name = "v" + std::to_string(lets.size() + 1);
      auto lists = ofKind('L');
      const VarInfo a = at(lists);
      const VarInfo b = at(lists);
      nodes += 3;
      calledRec = true;
      vars.push_back({name, 'L', a.m0 + b.m0, 0});
      addLet("(fa " + a.name + " " + b.name + ")");
    }
    std::string body = finalExpr();
    for (auto it = lets.rbegin(); it != lets.rend(); ++it)
      body = "(let " + it->first + " <- " + it->second + " in " + body + ")";
    src << body << "\n";
    return src.str();
  }
};

// ---------------------------------------------------------------------------
// Dynamic oracles

// All forward paths (up to a depth and count cap) from `start` that end on a
// cell, collected as cell -> paths.
void pathsToCells(const HeapView& view, Value start, Path& acc,
                  std::map<int, std::vector<Path>>& out, size_t& kept) {
  if (!start.isCell() || kept >= kSpellCap) return;
  out[start.cell].push_back(acc);
  ++kept;
  if (int(acc.size()) >= kSpellDepth) return;
  for (Sym s : {Sym::Car, Sym::Cdr}) {
    acc.syms.push_back(s);
    pathsToCells(view, view.slot(start.cell, s == Sym::Cdr), acc, out, kept);
    acc.syms.pop_back();
  }
}

std::map<int, std::vector<Path>> spellings(const HeapView& view, Value root) {
  std::map<int, std::vector<Path>> out;
  Path acc;
  size_t kept = 0;
  pathsToCells(view, root, acc, out, kept);
  return out;
}

const Nfa& shareMachine(AnalysisBundle& b, const Lang& lang) {
  auto it = b.shareClosure.find(lang.get());
  if (it == b.shareClosure.end())
    it = b.shareClosure
             .emplace(lang.get(), reductClosure(toNfa(b.share.system, lang)))
             .first;
  return it->second;
}

bool forwardOnly(const Path& p) {
  return std::all_of(p.syms.begin(), p.syms.end(),
                     [](Sym s) { return isForward(s); });
}

// Whether activation `node` runs within the extent of activation `anc`.
bool withinExtent(const std::vector<int>& parent, int anc, int node) {
  for (int a = node; a != -1; a = parent[a])
    if (a == anc) return true;
  return false;
}

}  // namespace

void OracleStats::flag(const std::string& what) {
  if (violations.size() < kMaxViolations) violations.push_back(what);
}

Program genProgram(unsigned seed, int sizeBound) {
  Gen g(seed, sizeBound);
  return parse(g.build());
}

void oracleLiveness(AnalysisBundle& b, const RunResult& run, OracleStats& st) {
  for (const VisitEvent& ev : run.visits) {
    if (ev.point < 0) continue;
    HeapView view = viewAt(run, ev.step);

    // Environment liveness speaks only for the visited activation's extent:
    // once it returns, later dereferences go through the caller's variables
    // and are checked against the caller's own visits instead.
    std::set<EdgeId> future;
    for (const DerefEvent& d : run.derefs)
      if (d.step > ev.step && withinExtent(run.actParent, ev.act, d.act))
        future.insert(d.edge);
    if (future.empty()) continue;

    std::set<int> pendReach;
    for (const Value& v : ev.pending) {
      std::vector<Value> stack{v};
      while (!stack.empty()) {
        Value cur = stack.back();
        stack.pop_back();
        if (!cur.isCell() || pendReach.count(cur.cell)) continue;
        pendReach.insert(cur.cell);
        stack.push_back(view.slot(cur.cell, false));
        stack.push_back(view.slot(cur.cell, true));
      }
    }

    std::map<std::string, std::map<int, std::vector<Path>>> reach;
    for (const VisBind& vb : ev.visible)
      reach[vb.var] = spellings(view, vb.value);

    for (const EdgeId& e : future) {
      if (e.root) {
        const VisBind* owner = nullptr;
        for (const VisBind& vb : ev.visible)
          if (vb.loc == e.id) owner = &vb;
        if (!owner) continue;  // another frame's root: not spellable here
        ++st.checks;
        if (!nfaAccepts(liveMachine(b, ev.point, owner->var), Path::eps()))
          st.flag("point " + std::to_string(ev.point) + ": root of " +
                  owner->var + " dereferenced later but not live");
        continue;
      }
      if (pendReach.count(e.id)) continue;  // held by a partial construction
      bool spellable = false, covered = false;
      std::string sample;
      for (const VisBind& vb : ev.visible) {
        auto it = reach[vb.var].find(e.id);
        if (it == reach[vb.var].end()) continue;
        const Nfa& live = liveMachine(b, ev.point, vb.var);
        for (const Path& beta : it->second) {
          Path alpha = beta;
          alpha.syms.push_back(e.cdr ? Sym::Cdr : Sym::Car);
          spellable = true;
          if (sample.empty()) sample = vb.var + "." + show(alpha);
          if (nfaAccepts(live, alpha)) {
            covered = true;
            break;
          }
        }
        if (covered) break;
      }
      if (!spellable) continue;
      ++st.checks;
      if (!covered)
        st.flag("point " + std::to_string(ev.point) + ": edge " + show(e) +
                " (" + sample + ") dereferenced later but not live");
    }
  }
}

void oracleSharing(AnalysisBundle& b, const RunResult& run, OracleStats& st) {
  for (const VisitEvent& ev : run.visits) {
    if (ev.point < 0 || ev.visible.empty()) continue;
    HeapView view = viewAt(run, ev.step);
    const auto& env = b.share.sharingAt[ev.point];

    std::vector<std::pair<std::string, std::map<int, std::vector<Path>>>> all;
    for (const VisBind& vb : ev.visible)
      all.emplace_back(vb.var, spellings(view, vb.value));
    std::sort(all.begin(), all.end(),
              [](const auto& a, const auto& c) { return a.first < c.first; });

    for (size_t i = 0; i < all.size(); ++i)
      for (size_t j = i; j < all.size(); ++j) {
        const auto& [u, pu] = all[i];
        const auto& [v, pv] = all[j];
        const Nfa* machine = nullptr;
        for (const auto& [cell, alphas] : pu) {
          auto it = pv.find(cell);
          if (it == pv.end()) continue;
          for (const Path& alpha : alphas)
            for (const Path& beta : it->second) {
              if (i == j && alpha == beta) continue;
              ++st.checks;
              if (!machine) {
                auto stored = env.find({u, v});
                if (stored == env.end()) {
                  st.flag("point " + std::to_string(ev.point) + ": " + u +
                          "/" + v + " share cell " + std::to_string(cell) +
                          " but no sharing language exists");
                  goto nextPair;
                }
                machine = &shareMachine(b, stored->second);
              }
              {
                // A stored fact p ~ q licenses every common extension
                // ps ~ qs, and the turn s·s~ never cancels under reduction,
                // so match after stripping any shared selector suffix.
                size_t la = alpha.size(), lb = beta.size();
                size_t maxStrip = 0;
                while (maxStrip < std::min(la, lb) &&
                       alpha.syms[la - 1 - maxStrip] ==
                           beta.syms[lb - 1 - maxStrip])
                  ++maxStrip;
                bool hit = false;
                for (size_t k = 0; k <= maxStrip && !hit; ++k) {
                  Path a2, b2;
                  a2.syms.assign(alpha.syms.begin(), alpha.syms.end() - k);
                  b2.syms.assign(beta.syms.begin(), beta.syms.end() - k);
                  hit = nfaAccepts(*machine, concat(a2, reverse(b2)));
                }
                if (!hit)
                  st.flag("point " + std::to_string(ev.point) + ": bipath " +
                          show(concat(alpha, reverse(beta))) + " of " + u +
                          "/" + v + " not covered");
              }
            }
        }
      nextPair:;
      }
  }
}

void oracleAvail(AnalysisBundle& b, const RunResult& run, OracleStats& st) {
  for (const VisitEvent& ev : run.visits) {
    if (ev.point < 0) continue;
    HeapView view = viewAt(run, ev.step);
    for (const auto& [var, paths] : b.avail.availAt[ev.point]) {
      const VisBind* owner = nullptr;
      for (const VisBind& vb : ev.visible)
        if (vb.var == var) owner = &vb;
      if (!owner) continue;
      for (const Path& alpha : paths) {
        if (!forwardOnly(alpha)) continue;
        ++st.checks;
        Value cur = owner->value;
        for (size_t k = 0; k < alpha.size(); ++k) {
          if (!cur.isCell()) {
            st.flag("point " + std::to_string(ev.point) + ": available " +
                    var + "." + show(alpha) + " hits " +
                    (cur.isNil() ? "nil" : "a scalar"));
            break;
          }
          cur = view.slot(cur.cell, alpha.syms[k] == Sym::Cdr);
        }
      }
    }
  }
}

void oracleTransform(AnalysisBundle& b, const RunResult& p,
                     const TransformResult& tr, const RunResult& q,
                     OracleStats& values, OracleStats& reach,
                     OracleStats& writes) {
  ++values.checks;
  if (!p.ok)
    values.flag("original run failed: " + p.error.message);
  else if (!q.ok)
    values.flag("transformed run failed: " + q.error.message);
  else if (!valuesEqual(p, p.value, q, q.value))
    values.flag("transformed value differs: " + show(p.value) + " vs " +
                show(q.value));
  if (!p.ok || !q.ok) return;

  int originalPoints = b.sp.program.pointCount;
  std::vector<const VisitEvent*> vp, vq;
  for (const VisitEvent& v : p.visits)
    if (v.point >= 0 && v.point < originalPoints) vp.push_back(&v);
  for (const VisitEvent& v : q.visits)
    if (v.point >= 0 && v.point < originalPoints) vq.push_back(&v);
  if (vp.size() != vq.size()) {
    reach.flag("visit sequences diverge");
    return;
  }
  for (size_t i = 0; i < vp.size(); ++i) {
    if (vp[i]->point != vq[i]->point) {
      reach.flag("visit sequences diverge at index " + std::to_string(i));
      return;
    }
    ++reach.checks;
    if (vq[i]->reachCells > vp[i]->reachCells)
      reach.flag("point " + std::to_string(vp[i]->point) +
                 ": transformed run reaches more cells");
  }

  for (const WriteEvent& w : q.writes) {
    int k = 0;
    for (const VisitEvent& v : q.visits)
      if (v.point == w.point && v.step < w.step) ++k;
    int seen = 0, anchor = -1;
    for (const VisitEvent& v : p.visits)
      if (v.point == w.point && seen++ == k) {
        anchor = v.step;
        break;
      }
    ++writes.checks;
    if (anchor < 0) {
      writes.flag("no aligned visit for a write at point " +
                  std::to_string(w.point));
      continue;
    }
    for (const DerefEvent& d : p.derefs)
      if (d.edge == w.edge && d.step >= anchor) {
        writes.flag("point " + std::to_string(w.point) + ": cleared edge " +
                    show(w.edge) + " is dereferenced later");
        break;
      }
  }
}

SoundnessOutcome checkProgram(const ScopedProgram& sp) {
  SoundnessOutcome out;
  AnalysisBundle b = analyzeAll(sp);
  RunResult p = evalProgram(sp);
  OracleStats live, share, avail, values, reach, writes;
  if (!p.ok) {
    out.ok = false;
    out.violations.push_back("evaluation failed: " + p.error.message);
    return out;
  }
  oracleLiveness(b, p, live);
  oracleSharing(b, p, share);
  oracleAvail(b, p, avail);

  Plan plan = planNullifications(b);
  TransformResult tr = applyPlan(sp, plan);
  ScopedProgram spq = resolveScopes(tr.program);
  RunResult q = evalProgram(spq, tr.firstFresh, tr.attribution);
  oracleTransform(b, p, tr, q, values, reach, writes);

  for (const OracleStats* st : {&live, &share, &avail, &values, &reach,
                                &writes}) {
    out.totalChecks += st->checks;
    for (const std::string& v : st->violations) out.violations.push_back(v);
  }
  out.ok = out.violations.empty();
  return out;
}

}  // namespace nullgc
