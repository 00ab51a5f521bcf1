#include "nullgc/nfa.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace nullgc {

namespace {
constexpr int kStateBudget = 20000;

std::vector<int> epsClosure(const Nfa& a, const std::vector<int>& seed) {
  std::vector<char> seen(a.numStates, 0);
  std::vector<int> stack = seed, out;
  for (int s : stack) seen[s] = 1;
  while (!stack.empty()) {
    int s = stack.back();
    stack.pop_back();
    out.push_back(s);
    for (int t : a.next[s][kEps])
      if (!seen[t]) {
        seen[t] = 1;
        stack.push_back(t);
      }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> step(const Nfa& a, const std::vector<int>& from, int sym) {
  std::set<int> to;
  for (int s : from)
    for (int t : a.next[s][sym]) to.insert(t);
  return {to.begin(), to.end()};
}

bool anyAccept(const Nfa& a, const std::vector<int>& states) {
  for (int s : states)
    if (a.accept[s]) return true;
  return false;
}

// Copies `src` into `dst`, returning the state-id offset.
int embed(Nfa& dst, const Nfa& src) {
  int base = dst.numStates;
  for (int i = 0; i < src.numStates; ++i) dst.addState();
  for (int s = 0; s < src.numStates; ++s)
    for (int sym = 0; sym <= kEps; ++sym)
      for (int t : src.next[s][sym]) dst.addEdge(base + s, sym, base + t);
  return base;
}

}  // namespace

int Nfa::addState() {
  if (numStates >= kStateBudget)
    throw std::runtime_error("language automaton exceeds state budget");
  accept.push_back(0);
  next.emplace_back();
  return numStates++;
}

void Nfa::addEdge(int from, int sym, int to) {
  auto& v = next[from][sym];
  if (std::find(v.begin(), v.end(), to) == v.end()) v.push_back(to);
}

bool Nfa::hasEdge(int from, int sym, int to) const {
  const auto& v = next[from][sym];
  return std::find(v.begin(), v.end(), to) != v.end();
}

Nfa nfaEmpty() {
  Nfa a;
  a.start = a.addState();
  return a;
}

Nfa nfaEpsilon() {
  Nfa a = nfaEmpty();
  a.accept[a.start] = 1;
  return a;
}

Nfa nfaWord(const Path& p) {
  if (p.bottom) return nfaEmpty();
  Nfa a;
  a.start = a.addState();
  int cur = a.start;
  for (Sym s : p.syms) {
    int nxt = a.addState();
    a.addEdge(cur, static_cast<int>(s), nxt);
    cur = nxt;
  }
  a.accept[cur] = 1;
  return a;
}

Nfa nfaFromSet(const PathSet& s) {
  Nfa a = nfaEmpty();
  for (const Path& p : s) {
    if (p.bottom) continue;
    int cur = a.start;
    for (Sym sym : p.syms) {
      int nxt = a.addState();
      a.addEdge(cur, static_cast<int>(sym), nxt);
      cur = nxt;
    }
    a.accept[cur] = 1;
  }
  return a;
}

Nfa nfaUnion(const Nfa& a, const Nfa& b) {
  Nfa out;
  out.start = out.addState();
  int ba = embed(out, a), bb = embed(out, b);
  out.addEdge(out.start, kEps, ba + a.start);
  out.addEdge(out.start, kEps, bb + b.start);
  for (int s = 0; s < a.numStates; ++s) out.accept[ba + s] = a.accept[s];
  for (int s = 0; s < b.numStates; ++s) out.accept[bb + s] = b.accept[s];
  return out;
}

Nfa nfaConcat(const Nfa& a, const Nfa& b) {
  Nfa out;
  int ba = embed(out, a), bb = embed(out, b);
  out.start = ba + a.start;
  for (int s = 0; s < a.numStates; ++s)
    if (a.accept[s]) out.addEdge(ba + s, kEps, bb + b.start);
  for (int s = 0; s < b.numStates; ++s) out.accept[bb + s] = b.accept[s];
  return out;
}

Nfa nfaReverse(const Nfa& a) {
  Nfa out;
  for (int i = 0; i < a.numStates; ++i) out.addState();
  for (int s = 0; s < a.numStates; ++s)
    for (int sym = 0; sym <= kEps; ++sym)
      for (int t : a.next[s][sym])
        out.addEdge(t, sym == kEps ? kEps : (sym ^ 2), s);
  out.start = out.addState();
  for (int s = 0; s < a.numStates; ++s)
    if (a.accept[s]) out.addEdge(out.start, kEps, s);
  out.accept[a.start] = 1;
  return out;
}

bool nfaAccepts(const Nfa& a, const Path& p) {
  if (p.bottom) return false;
  std::vector<int> cur = epsClosure(a, {a.start});
  for (Sym s : p.syms) {
    cur = epsClosure(a, step(a, cur, static_cast<int>(s)));
    if (cur.empty()) return false;
  }
  return anyAccept(a, cur);
}

bool nfaIsEmpty(const Nfa& a) {
  std::vector<char> seen(a.numStates, 0);
  std::vector<int> stack = {a.start};
  seen[a.start] = 1;
  while (!stack.empty()) {
    int s = stack.back();
    stack.pop_back();
    if (a.accept[s]) return false;
    for (int sym = 0; sym <= kEps; ++sym)
      for (int t : a.next[s][sym])
        if (!seen[t]) {
          seen[t] = 1;
          stack.push_back(t);
        }
  }
  return true;
}

Nfa nfaIntersect(const Nfa& a0, const Nfa& b0) {
  Nfa a = nfaEpsFree(a0), b = nfaEpsFree(b0);
  Nfa out;
  std::map<std::pair<int, int>, int> id;
  std::deque<std::pair<int, int>> work;
  auto get = [&](int x, int y) {
    auto it = id.find({x, y});
    if (it != id.end()) return it->second;
    int s = out.addState();
    out.accept[s] = a.accept[x] && b.accept[y];
    id[{x, y}] = s;
    work.push_back({x, y});
    return s;
  };
  out.start = get(a.start, b.start);
  while (!work.empty()) {
    auto [x, y] = work.front();
    work.pop_front();
    int from = id[{x, y}];
    for (int sym = 0; sym < 4; ++sym)
      for (int tx : a.next[x][sym])
        for (int ty : b.next[y][sym]) out.addEdge(from, sym, get(tx, ty));
  }
  return out;
}

bool nfaIntersectEmpty(const Nfa& a, const Nfa& b) {
  return nfaIsEmpty(nfaIntersect(a, b));
}

Nfa nfaForwardUniverse() {
  Nfa a = nfaEmpty();
  a.accept[a.start] = 1;
  a.addEdge(a.start, static_cast<int>(Sym::Car), a.start);
  a.addEdge(a.start, static_cast<int>(Sym::Cdr), a.start);
  return a;
}

Nfa nfaCanonicalShape() {
  Nfa a = nfaEmpty();
  int fwd = a.start;
  int bwd = a.addState();
  a.accept[fwd] = 1;
  a.accept[bwd] = 1;
  for (Sym s : {Sym::Car, Sym::Cdr}) a.addEdge(fwd, static_cast<int>(s), fwd);
  for (Sym s : {Sym::CarB, Sym::CdrB}) {
    a.addEdge(fwd, static_cast<int>(s), bwd);
    a.addEdge(bwd, static_cast<int>(s), bwd);
  }
  return a;
}

Nfa nfaMixedOrEps() {
  Nfa a = nfaEmpty();
  int fresh = a.start;  // no symbol seen yet; accepts the empty word
  int fwdOnly = a.addState();
  int bwdOnly = a.addState();
  int mixed = a.addState();
  a.accept[fresh] = 1;
  a.accept[mixed] = 1;
  for (Sym s : {Sym::Car, Sym::Cdr}) {
    a.addEdge(fresh, static_cast<int>(s), fwdOnly);
    a.addEdge(fwdOnly, static_cast<int>(s), fwdOnly);
    a.addEdge(bwdOnly, static_cast<int>(s), mixed);
    a.addEdge(mixed, static_cast<int>(s), mixed);
  }
  for (Sym s : {Sym::CarB, Sym::CdrB}) {
    a.addEdge(fresh, static_cast<int>(s), bwdOnly);
    a.addEdge(bwdOnly, static_cast<int>(s), bwdOnly);
    a.addEdge(fwdOnly, static_cast<int>(s), mixed);
    a.addEdge(mixed, static_cast<int>(s), mixed);
  }
  return a;
}

Nfa nfaEpsFree(const Nfa& a) {
  Nfa out = a;
  for (int s = 0; s < a.numStates; ++s) {
    std::vector<int> cl = epsClosure(a, {s});
    for (int p : cl) {
      if (a.accept[p]) out.accept[s] = 1;
      for (int sym = 0; sym < 4; ++sym)
        for (int t : a.next[p][sym]) out.addEdge(s, sym, t);
    }
    out.next[s][kEps].clear();
  }
  return out;
}

Nfa nfaTrim(const Nfa& a) {
  std::vector<char> fwd(a.numStates, 0);
  std::vector<int> stack = {a.start};
  fwd[a.start] = 1;
  while (!stack.empty()) {
    int s = stack.back();
    stack.pop_back();
    for (int sym = 0; sym <= kEps; ++sym)
      for (int t : a.next[s][sym])
        if (!fwd[t]) {
          fwd[t] = 1;
          stack.push_back(t);
        }
  }
  // Backward reachability from accepting states.
  std::vector<std::vector<int>> rev(a.numStates);
  for (int s = 0; s < a.numStates; ++s)
    for (int sym = 0; sym <= kEps; ++sym)
      for (int t : a.next[s][sym]) rev[t].push_back(s);
  std::vector<char> bwd(a.numStates, 0);
  for (int s = 0; s < a.numStates; ++s)
    if (a.accept[s] && fwd[s]) {
      bwd[s] = 1;
      stack.push_back(s);
    }
  while (!stack.empty()) {
    int s = stack.back();
    stack.pop_back();
    for (int t : rev[s])
      if (!bwd[t]) {
        bwd[t] = 1;
        stack.push_back(t);
      }
  }
  std::vector<int> remap(a.numStates, -1);
  Nfa out;
  for (int s = 0; s < a.numStates; ++s)
    if (fwd[s] && bwd[s]) remap[s] = out.addState();
  if (remap[a.start] < 0) return nfaEmpty();
  out.start = remap[a.start];
  for (int s = 0; s < a.numStates; ++s) {
    if (remap[s] < 0) continue;
    out.accept[remap[s]] = a.accept[s];
    for (int sym = 0; sym <= kEps; ++sym)
      for (int t : a.next[s][sym])
        if (remap[t] >= 0) out.addEdge(remap[s], sym, remap[t]);
  }
  return out;
}

std::vector<Path> nfaEnumerate(const Nfa& a0, int maxLen, size_t cap) {
  Nfa a = nfaEpsFree(a0);
  std::vector<Path> out;
  struct Node {
    std::vector<int> states;
    Path word;
  };
  std::deque<Node> queue;
  queue.push_back({epsClosure(a, {a.start}), Path{}});
  size_t budget = 4u << 20;
  while (!queue.empty() && budget-- > 0) {
    Node n = std::move(queue.front());
    queue.pop_front();
    if (anyAccept(a, n.states)) {
      out.push_back(n.word);
      if (cap && out.size() >= cap) return out;
    }
    if (static_cast<int>(n.word.syms.size()) >= maxLen) continue;
    for (int sym = 0; sym < 4; ++sym) {
      std::vector<int> to = step(a, n.states, sym);
      if (to.empty()) continue;
      Path w = n.word;
      w.syms.push_back(static_cast<Sym>(sym));
      queue.push_back({std::move(to), std::move(w)});
    }
  }
  return out;
}

namespace {

// Saturates with epsilon edges across adjacent cancelling pairs until the
// literal transition relation and acceptance stop changing.
Nfa saturate(const Nfa& input) {
  Nfa a = nfaEpsFree(input);
  size_t guard = static_cast<size_t>(a.numStates) * a.numStates * 5 + 2;
  for (size_t iter = 0;; ++iter) {
    if (iter > guard)
      throw std::logic_error("reduction saturation failed to converge");
    bool changed = false;
    for (int q = 0; q < a.numStates; ++q) {
      for (int barred = 2; barred <= 3; ++barred) {
        int forward = barred - 2;
        for (int mid : a.next[q][barred])
          for (int to : a.next[mid][forward])
            if (!a.hasEdge(q, kEps, to)) {
              a.addEdge(q, kEps, to);
              changed = true;
            }
      }
    }
    if (!changed) break;
    Nfa flat = nfaEpsFree(a);
    bool same = true;
    for (int s = 0; same && s < a.numStates; ++s) {
      if (flat.accept[s] != a.accept[s]) same = false;
      for (int sym = 0; same && sym < 4; ++sym) {
        auto x = a.next[s][sym], y = flat.next[s][sym];
        std::sort(x.begin(), x.end());
        std::sort(y.begin(), y.end());
        if (x != y) same = false;
      }
    }
    a = std::move(flat);
    if (same) break;
  }
  return a;
}

}  // namespace

Nfa simplify(const Nfa& input) {
  Nfa a = saturate(input);
  for (int s = 0; s < a.numStates; ++s) {
    a.next[s][2].clear();
    a.next[s][3].clear();
  }
  return nfaTrim(a);
}

Nfa reductClosure(const Nfa& input) { return saturate(input); }

std::string nfaDot(const Nfa& a, const std::string& name) {
  static const char* labels[5] = {"0", "1", "0~", "1~", "&epsilon;"};
  std::ostringstream os;
  os << "digraph \"" << name << "\" {\n  rankdir=LR;\n"
     << "  hidden [shape=point];\n";
  for (int s = 0; s < a.numStates; ++s)
    os << "  n" << s << " [shape=" << (a.accept[s] ? "doublecircle" : "circle")
       << " label=\"" << s << "\"];\n";
  os << "  hidden -> n" << a.start << ";\n";
  for (int s = 0; s < a.numStates; ++s)
    for (int sym = 0; sym <= kEps; ++sym)
      for (int t : a.next[s][sym])
        os << "  n" << s << " -> n" << t << " [label=\"" << labels[sym]
           << "\"];\n";
  os << "}\n";
  return os.str();
}

std::string nfaStats(const Nfa& a) {
  int edges = 0, accepts = 0;
  for (int s = 0; s < a.numStates; ++s) {
    accepts += a.accept[s] ? 1 : 0;
    for (int sym = 0; sym <= kEps; ++sym)
      edges += static_cast<int>(a.next[s][sym].size());
  }
  std::ostringstream os;
  os << a.numStates << " states, " << edges << " edges, " << accepts
     << " accepting";
  return os.str();
}

}  // namespace nullgc
