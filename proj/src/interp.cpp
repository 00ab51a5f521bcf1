#include "nullgc/interp.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <sstream>

namespace nullgc {

namespace {

constexpr int kVisitBudget = 1'000'000;
// Nontermination in this language always nests evaluations, so cap the
// interpreter's own recursion well below the host stack limit.
constexpr int kDepthBudget = 8'000;

struct Thrown {
  EvalError error;
};

struct Binding {
  std::string var;
  int loc;
  Value value;
};

struct Frame {
  std::vector<Binding> binds;
};

struct Interp {
  const ScopedProgram& sp;
  int firstFresh;
  const std::vector<ProgramPoint>* attribution;

  RunResult out;
  std::vector<std::pair<Value, Value>> slots;  // current heap
  std::vector<Frame> frames;
  std::vector<Value> rootValues;               // current, by loc
  std::vector<std::vector<Value>> pending;
  std::map<std::string, const FunctionDef*> funcs;
  int visitCount = 0;
  int depth = 0;
  int curAct = 0;  // current call-tree node; 0 is the program body

  Interp(const ScopedProgram& s, int ff, const std::vector<ProgramPoint>* at)
      : sp(s), firstFresh(ff), attribution(at) {
    for (const FunctionDef& d : sp.program.defs) funcs[d.name] = &d;
    out.actParent.push_back(-1);
  }

  int tick() { return out.steps++; }

  ProgramPoint attr(ProgramPoint p) const {
    if (attribution && p >= firstFresh &&
        p - firstFresh < int(attribution->size()))
      return (*attribution)[p - firstFresh];
    return p;
  }

  [[noreturn]] void fail(ProgramPoint pt, const std::string& msg) {
    throw Thrown{EvalError{pt, msg}};
  }

  static Value strip(Value v) {
    v.hasProv = false;
    return v;
  }

  // A value is inspected: record the dereference of the edge it came over.
  void use(const Value& v, ProgramPoint pt) {
    if (v.hasProv) out.derefs.push_back({tick(), v.prov, pt, curAct});
  }

  Binding* findBinding(const std::string& name) {
    auto& binds = frames.back().binds;
    for (auto it = binds.rbegin(); it != binds.rend(); ++it)
      if (it->var == name) return &*it;
    return nullptr;
  }

  int bind(const std::string& var, Value v, ProgramPoint pt) {
    int loc = int(out.binds.size());
    Value init = strip(v);
    out.binds.push_back({tick(), var, pt, init});
    rootValues.push_back(init);
    frames.back().binds.push_back({var, loc, init});
    return loc;
  }

  void reachFrom(const Value& v, std::set<int>& seen) const {
    if (!v.isCell() || seen.count(v.cell)) return;
    seen.insert(v.cell);
    reachFrom(slots[v.cell].first, seen);
    reachFrom(slots[v.cell].second, seen);
  }

  int reachCount() const {
    std::set<int> seen;
    for (const Frame& f : frames)
      for (const Binding& b : f.binds) reachFrom(b.value, seen);
    for (const auto& grp : pending)
      for (const Value& v : grp) reachFrom(v, seen);
    return int(seen.size());
  }

  void visit(ProgramPoint pt) {
    if (++visitCount > kVisitBudget) fail(pt, "step budget exceeded");
    VisitEvent ev;
    ev.step = tick();
    ev.point = pt;
    ev.act = curAct;
    if (!frames.empty())
      for (const Binding& b : frames.back().binds)
        ev.visible.push_back({b.var, b.loc, b.value});
    for (const auto& grp : pending)
      for (const Value& v : grp) ev.pending.push_back(v);
    ev.reachCells = reachCount();
    out.visits.push_back(std::move(ev));
  }

  Value eval(const Expr& e) {
    if (++depth > kDepthBudget) fail(e.point, "step budget exceeded");
    Value r = evalKinds(e);
    --depth;
    return r;
  }

  Value evalKinds(const Expr& e) {
    visit(e.point);
    switch (e.kind) {
      case ExprKind::Const: {
        Value v;
        v.tag = e.isBool ? Value::Tag::Bool : Value::Tag::Int;
        v.num = e.num;
        return v;
      }
      case ExprKind::Nil:
        return Value{};
      case ExprKind::Var: {
        Binding* b = findBinding(e.name);
        if (!b) fail(e.point, "unbound variable " + e.name);
        Value v = b->value;
        v.hasProv = true;
        v.prov = EdgeId{true, b->loc, false};
        return v;
      }
      case ExprKind::Cons: {
        pending.emplace_back();
        Value a = strip(eval(e.kids[0]));
        pending.back().push_back(a);
        Value d = strip(eval(e.kids[1]));
        pending.pop_back();
        int idx = int(out.cells.size());
        out.cells.push_back({tick(), a, d});
        slots.push_back({a, d});
        Value v;
        v.tag = Value::Tag::Cell;
        v.cell = idx;
        return v;
      }
      case ExprKind::Car:
      case ExprKind::Cdr: {
        Value v = eval(e.kids[0]);
        use(v, e.point);
        if (!v.isCell())
          fail(e.point, std::string(e.kind == ExprKind::Car ? "car" : "cdr") +
                            " of " + (v.isNil() ? "nil" : "a non-pair"));
        bool wantCdr = e.kind == ExprKind::Cdr;
        Value r = wantCdr ? slots[v.cell].second : slots[v.cell].first;
        r.hasProv = true;
        r.prov = EdgeId{false, v.cell, wantCdr};
        return r;
      }
      case ExprKind::NullQ:
      case ExprKind::PairQ: {
        Value v = eval(e.kids[0]);
        use(v, e.point);
        Value r;
        r.tag = Value::Tag::Bool;
        r.num = (e.kind == ExprKind::NullQ) ? v.isNil() : v.isCell();
        return r;
      }
      case ExprKind::Prim: {
        pending.emplace_back();
        Value a = eval(e.kids[0]);
        use(a, e.point);
        if (a.tag != Value::Tag::Int) fail(e.point, "prim on a non-scalar");
        pending.back().push_back(strip(a));
        Value b = eval(e.kids[1]);
        use(b, e.point);
        if (b.tag != Value::Tag::Int) fail(e.point, "prim on a non-scalar");
        pending.pop_back();
        Value r;
        r.tag = Value::Tag::Int;
        r.num = a.num + b.num;
        return r;
      }
      case ExprKind::If: {
        Value c = eval(e.kids[0]);
        use(c, e.point);
        bool truthy = !(c.isNil() || (c.tag == Value::Tag::Bool && !c.num));
        return eval(truthy ? e.kids[1] : e.kids[2]);
      }
      case ExprKind::Let: {
        Value init = eval(e.kids[0]);
        int loc = bind(e.name, init, e.point);
        Value r = eval(e.kids[1]);
        frames.back().binds.pop_back();
        if (r.hasProv && r.prov.root && r.prov.id == loc) r.hasProv = false;
        return r;
      }
      case ExprKind::Call: {
        auto it = funcs.find(e.name);
        if (it == funcs.end()) fail(e.point, "unbound function " + e.name);
        const FunctionDef& def = *it->second;
        if (def.params.size() != e.kids.size())
          fail(e.point, "arity mismatch calling " + e.name);
        pending.emplace_back();
        for (const Expr& arg : e.kids)
          pending.back().push_back(strip(eval(arg)));
        std::vector<Value> args = std::move(pending.back());
        pending.pop_back();
        int base = int(out.binds.size());
        frames.emplace_back();
        for (size_t i = 0; i < args.size(); ++i)
          bind(def.params[i], args[i], e.point);
        int caller = curAct;
        curAct = int(out.actParent.size());
        out.actParent.push_back(caller);
        Value r = eval(def.body);
        curAct = caller;
        frames.pop_back();
        if (r.hasProv && r.prov.root && r.prov.id >= base) r.hasProv = false;
        return r;
      }
      case ExprKind::SetRoot: {
        Binding* b = findBinding(e.name);
        if (!b) fail(e.point, "unbound variable " + e.name);
        out.writes.push_back(
            {tick(), EdgeId{true, b->loc, false}, attr(e.point),
             !b->value.isNil()});
        b->value = Value{};
        rootValues[b->loc] = Value{};
        return Value{};
      }
      case ExprKind::SetCar:
      case ExprKind::SetCdr: {
        Value v = eval(e.kids[0]);
        use(v, e.point);
        if (!v.isCell()) return Value{};  // silently skip non-pairs
        bool wantCdr = e.kind == ExprKind::SetCdr;
        Value& slot = wantCdr ? slots[v.cell].second : slots[v.cell].first;
        out.writes.push_back(
            {tick(), EdgeId{false, v.cell, wantCdr}, attr(e.point),
             !slot.isNil()});
        slot = Value{};
        return Value{};
      }
      case ExprKind::Begin: {
        Value r;
        for (const Expr& k : e.kids) r = eval(k);
        return r;
      }
    }
    fail(e.point, "unhandled form");
  }

  void exitDerefs(const Value& result) {
    use(result, kExitPoint);
    std::set<int> seen;
    derefTree(result, seen);
    VisitEvent ev;
    ev.step = tick();
    ev.point = kExitPoint;
    ev.act = curAct;
    ev.reachCells = reachCount();
    out.visits.push_back(std::move(ev));
  }

  // The whole result tree counts as dereferenced at exit: both slot edges of
  // every cell reachable from the result.
  void derefTree(const Value& v, std::set<int>& seen) {
    if (!v.isCell() || seen.count(v.cell)) return;
    seen.insert(v.cell);
    out.derefs.push_back({tick(), EdgeId{false, v.cell, false}, kExitPoint,
                          curAct});
    derefTree(slots[v.cell].first, seen);
    out.derefs.push_back({tick(), EdgeId{false, v.cell, true}, kExitPoint,
                          curAct});
    derefTree(slots[v.cell].second, seen);
  }

  RunResult run() {
    frames.emplace_back();
    try {
      Value result = eval(sp.program.body);
      exitDerefs(result);
      out.value = strip(result);
      out.ok = true;
    } catch (const Thrown& t) {
      out.ok = false;
      out.error = t.error;
    }
    out.finalSlots = slots;
    return std::move(out);
  }
};

}  // namespace

RunResult evalProgram(const ScopedProgram& sp) {
  Interp in(sp, sp.program.pointCount, nullptr);
  return in.run();
}

RunResult evalProgram(const ScopedProgram& sp, int firstFresh,
                      const std::vector<ProgramPoint>& attribution) {
  Interp in(sp, firstFresh, &attribution);
  return in.run();
}

bool HeapView::born(int cell) const {
  return cell >= 0 && cell < int(run->cells.size()) &&
         run->cells[cell].step < step;
}

Value HeapView::slot(int cell, bool cdr) const {
  assert(born(cell));
  for (const WriteEvent& w : run->writes)
    if (w.step < step && !w.edge.root && w.edge.id == cell && w.edge.cdr == cdr)
      return Value{};
  return cdr ? run->cells[cell].cdr : run->cells[cell].car;
}

bool HeapView::bound(int loc) const {
  return loc >= 0 && loc < int(run->binds.size()) &&
         run->binds[loc].step < step;
}

Value HeapView::root(int loc) const {
  assert(bound(loc));
  for (const WriteEvent& w : run->writes)
    if (w.step < step && w.edge.root && w.edge.id == loc) return Value{};
  return run->binds[loc].value;
}

HeapView viewAt(const RunResult& run, int step) { return HeapView{&run, step}; }

std::optional<Value> walkPath(const HeapView& view, Value start,
                              const Path& alpha) {
  assert(!alpha.isBottom());
  Value cur = start;
  for (Sym s : alpha.syms) {
    assert(isForward(s));
    if (!cur.isCell()) return std::nullopt;
    cur = view.slot(cur.cell, s == Sym::Cdr);
  }
  return cur;
}

std::map<ProgramPoint, std::set<EdgeId>> traceDerefs(const RunResult& run) {
  std::map<ProgramPoint, int> last;
  for (const VisitEvent& v : run.visits) last[v.point] = v.step;
  std::map<ProgramPoint, std::set<EdgeId>> out;
  for (const auto& [pt, step] : last) {
    auto& edges = out[pt];
    for (const DerefEvent& d : run.derefs)
      if (d.step > step) edges.insert(d.edge);
  }
  return out;
}

const VisitEvent* lastVisit(const RunResult& run, ProgramPoint p) {
  const VisitEvent* found = nullptr;
  for (const VisitEvent& v : run.visits)
    if (v.point == p) found = &v;
  return found;
}

bool valuesEqual(const RunResult& a, Value va, const RunResult& b, Value vb) {
  if (va.tag != vb.tag) return false;
  switch (va.tag) {
    case Value::Tag::Nil:
      return true;
    case Value::Tag::Int:
    case Value::Tag::Bool:
      return va.num == vb.num;
    case Value::Tag::Cell:
      return valuesEqual(a, a.finalSlots[va.cell].first, b,
                         b.finalSlots[vb.cell].first) &&
             valuesEqual(a, a.finalSlots[va.cell].second, b,
                         b.finalSlots[vb.cell].second);
  }
  return false;
}

ReachStats reachStats(const RunResult& p, const RunResult& q,
                      int originalPointCount) {
  ReachStats out;
  std::vector<ProgramPoint> sp, sq;
  for (const VisitEvent& v : p.visits)
    if (v.point >= 0 && v.point < originalPointCount) sp.push_back(v.point);
  for (const VisitEvent& v : q.visits)
    if (v.point >= 0 && v.point < originalPointCount) sq.push_back(v.point);
  if (sp != sq) {
    out.divergent = true;
    return out;
  }
  std::map<ProgramPoint, std::pair<int, int>> rows;
  for (const VisitEvent& v : p.visits)
    if (v.point >= 0 && v.point < originalPointCount)
      rows[v.point].first = v.reachCells;
  for (const VisitEvent& v : q.visits)
    if (v.point >= 0 && v.point < originalPointCount)
      rows[v.point].second = v.reachCells;
  for (const auto& [pt, counts] : rows)
    out.rows.push_back({pt, counts.first, counts.second});
  return out;
}

std::string show(const EdgeId& e) {
  if (e.root) return "root:" + std::to_string(e.id);
  return std::to_string(e.id) + (e.cdr ? ".cdr" : ".car");
}

std::string show(const Value& v) {
  switch (v.tag) {
    case Value::Tag::Nil:
      return "nil";
    case Value::Tag::Int:
      return std::to_string(v.num);
    case Value::Tag::Bool:
      return v.num ? "#t" : "#f";
    case Value::Tag::Cell:
      return "cell:" + std::to_string(v.cell);
  }
  return "?";
}

std::string dotMemoryGraph(const RunResult& run, ProgramPoint p) {
  const VisitEvent* v = lastVisit(run, p);
  std::ostringstream os;
  os << "digraph memory {\n  rankdir=LR;\n  node [shape=record];\n";
  if (v) {
    HeapView view = viewAt(run, v->step);
    std::vector<VisBind> roots = v->visible;
    std::sort(roots.begin(), roots.end(),
              [](const VisBind& a, const VisBind& b) { return a.var < b.var; });
    std::set<int> cells;
    auto collect = [&](auto&& self, const Value& val) -> void {
      if (!val.isCell() || cells.count(val.cell)) return;
      cells.insert(val.cell);
      self(self, view.slot(val.cell, false));
      self(self, view.slot(val.cell, true));
    };
    for (const VisBind& r : roots) collect(collect, view.root(r.loc));
    for (const VisBind& r : roots) {
      os << "  root_" << r.var << " [shape=plaintext, label=\"" << r.var
         << "\"];\n";
      Value val = view.root(r.loc);
      if (val.isCell())
        os << "  root_" << r.var << " -> c" << val.cell << ";\n";
      else
        os << "  root_" << r.var << "_v [shape=plaintext, label=\""
           << show(val) << "\"];\n  root_" << r.var << " -> root_" << r.var
           << "_v;\n";
    }
    for (int c : cells) {
      Value a = view.slot(c, false), d = view.slot(c, true);
      os << "  c" << c << " [label=\"<car> "
         << (a.isCell() ? std::string(".") : show(a)) << "|<cdr> "
         << (d.isCell() ? std::string(".") : show(d)) << "\"];\n";
      if (a.isCell()) os << "  c" << c << ":car -> c" << a.cell << ";\n";
      if (d.isCell()) os << "  c" << c << ":cdr -> c" << d.cell << ";\n";
    }
  }
  os << "}\n";
  return os.str();
}

}  // namespace nullgc
