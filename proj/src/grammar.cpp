#include "nullgc/grammar.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <set>

namespace nullgc {

namespace {

constexpr const char* kRootName = "@query";
constexpr const char* kRevSuffix = "~rev";

struct Factor {
  bool isRef = false;
  PathSet lit;      // when !isRef
  std::string ref;  // when isRef
};
using Alt = std::vector<Factor>;

std::string revName(const std::string& n) {
  size_t suf = std::string(kRevSuffix).size();
  if (n.size() > suf && n.compare(n.size() - suf, suf, kRevSuffix) == 0)
    return n.substr(0, n.size() - suf);
  return n + kRevSuffix;
}

// Pushes reversals down to literals and nonterminal references.
Lang pushReverse(const Lang& l) {
  switch (l->kind) {
    case LangKind::Empty:
    case LangKind::Lit:
      return lReverse(l);
    case LangKind::Nonterm:
      return lNonterm(revName(l->name));
    case LangKind::Union: {
      std::vector<Lang> kids;
      for (const auto& k : l->kids) kids.push_back(pushReverse(k));
      return lUnion(std::move(kids));
    }
    case LangKind::Concat: {
      std::vector<Lang> kids;
      for (auto it = l->kids.rbegin(); it != l->kids.rend(); ++it)
        kids.push_back(pushReverse(*it));
      return lConcat(std::move(kids));
    }
    case LangKind::Reverse:
      return l->kids[0];
    default:
      throw LangError("cannot reverse an unresolved language form");
  }
}

class Builder {
 public:
  explicit Builder(const LangSystem& sys) : sys_(sys) {}

  Nfa build(const Lang& root) {
    Lang body = expandApplies(root);
    if (containsVar(body))
      throw LangError("free demand placeholder in a language query");
    synthetic_[kRootName] = body;
    need(kRootName);
    while (!pending_.empty()) {
      std::string name = pending_.front();
      pending_.pop_front();
      gram_[name] = normalize(bodyOf(name));
    }
    prune();
    if (gram_[kRootName].empty()) return nfaEmpty();
    computeSccs();
    return nfaTrim(machineFor(kRootName));
  }

 private:
  const LangSystem& sys_;
  std::map<std::string, Lang> synthetic_;
  std::map<std::string, std::vector<Alt>> gram_;
  std::deque<std::string> pending_;
  std::set<std::string> known_;
  int helperCount_ = 0;

  std::map<std::string, int> sccOf_;
  std::vector<std::vector<std::string>> sccs_;
  std::map<int, Nfa> sccProto_;
  std::map<int, std::map<std::string, int>> sccEntry_, sccExit_;
  std::map<int, int> sccKind_;  // 0 right-linear, 1 left-linear, 2 general
  std::map<std::string, Nfa> byName_;

  void need(const std::string& name) {
    if (known_.insert(name).second) pending_.push_back(name);
  }

  Lang bodyOf(const std::string& name) {
    auto syn = synthetic_.find(name);
    if (syn != synthetic_.end()) return syn->second;
    auto it = sys_.rules.find(name);
    if (it != sys_.rules.end()) {
      Lang body = expandApplies(it->second);
      if (containsVar(body))
        throw LangError("free demand placeholder in rule " + name);
      return body;
    }
    std::string base = revName(name);
    if (base != name && (sys_.rules.count(base) || synthetic_.count(base)))
      return pushReverse(bodyOf(base));
    throw LangError("unknown nonterminal " + name);
  }

  std::vector<Alt> normalize(const Lang& l) {
    switch (l->kind) {
      case LangKind::Empty:
        return {};
      case LangKind::Lit:
        return {{Factor{false, l->lit, ""}}};
      case LangKind::Nonterm:
        need(l->name);
        return {{Factor{true, {}, l->name}}};
      case LangKind::Reverse:
        return normalize(pushReverse(l->kids[0]));
      case LangKind::Union: {
        std::vector<Alt> out;
        for (const auto& k : l->kids) {
          auto sub = normalize(k);
          out.insert(out.end(), sub.begin(), sub.end());
        }
        return out;
      }
      case LangKind::Concat: {
        Alt factors;
        for (const auto& k : l->kids) {
          auto sub = normalize(k);
          if (sub.size() == 1) {
            factors.insert(factors.end(), sub[0].begin(), sub[0].end());
          } else {
            std::string helper = "_t" + std::to_string(++helperCount_);
            known_.insert(helper);
            gram_[helper] = sub;
            factors.push_back(Factor{true, {}, helper});
          }
        }
        return {factors};
      }
      default:
        throw LangError("unresolved language form in grammar conversion");
    }
  }

  void prune() {
    // Productivity fixpoint, then pruning of alternatives that mention
    // unproductive rules.
    std::set<std::string> productive;
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& [name, alts] : gram_) {
        if (productive.count(name)) continue;
        for (const Alt& alt : alts) {
          bool ok = true;
          for (const Factor& f : alt)
            if (f.isRef && !productive.count(f.ref)) {
              ok = false;
              break;
            }
          if (ok) {
            productive.insert(name);
            changed = true;
            break;
          }
        }
      }
    }
    for (auto& [name, alts] : gram_) {
      std::vector<Alt> kept;
      for (Alt& alt : alts) {
        bool ok = true;
        for (const Factor& f : alt)
          if (f.isRef && !productive.count(f.ref)) {
            ok = false;
            break;
          }
        if (ok) kept.push_back(std::move(alt));
      }
      alts = std::move(kept);
    }
  }

  void computeSccs() {
    // Tarjan over the reference graph of pruned, reachable rules.
    std::map<std::string, int> index, low;
    std::vector<std::string> stack;
    std::set<std::string> onStack;
    int counter = 0;
    std::function<void(const std::string&)> strongconnect =
        [&](const std::string& v) {
          index[v] = low[v] = counter++;
          stack.push_back(v);
          onStack.insert(v);
          for (const Alt& alt : gram_[v])
            for (const Factor& f : alt) {
              if (!f.isRef) continue;
              if (!index.count(f.ref)) {
                strongconnect(f.ref);
                low[v] = std::min(low[v], low[f.ref]);
              } else if (onStack.count(f.ref)) {
                low[v] = std::min(low[v], index[f.ref]);
              }
            }
          if (low[v] == index[v]) {
            std::vector<std::string> comp;
            while (true) {
              std::string w = stack.back();
              stack.pop_back();
              onStack.erase(w);
              comp.push_back(w);
              if (w == v) break;
            }
            std::sort(comp.begin(), comp.end());
            int id = static_cast<int>(sccs_.size());
            for (const auto& m : comp) sccOf_[m] = id;
            sccs_.push_back(std::move(comp));
          }
        };
    strongconnect(kRootName);
  }

  bool internalRef(int scc, const Factor& f) const {
    if (!f.isRef) return false;
    auto it = sccOf_.find(f.ref);
    return it != sccOf_.end() && it->second == scc;
  }

  // Lays a literal path between two states through fresh intermediates.
  void layWord(Nfa& m, int from, const Path& p, int to) {
    if (p.bottom) return;
    int cur = from;
    for (size_t i = 0; i < p.syms.size(); ++i) {
      int nxt = (i + 1 == p.syms.size()) ? to : m.addState();
      m.addEdge(cur, static_cast<int>(p.syms[i]), nxt);
      cur = nxt;
    }
    if (p.syms.empty()) m.addEdge(from, kEps, to);
  }

  void layFactor(Nfa& m, int from, const Factor& f, int to) {
    if (!f.isRef) {
      for (const Path& p : f.lit) layWord(m, from, p, to);
      return;
    }
    const Nfa& child = machineFor(f.ref);
    int base = m.numStates;
    for (int i = 0; i < child.numStates; ++i) m.addState();
    for (int s = 0; s < child.numStates; ++s)
      for (int sym = 0; sym <= kEps; ++sym)
        for (int t : child.next[s][sym]) m.addEdge(base + s, sym, base + t);
    m.addEdge(from, kEps, base + child.start);
    for (int s = 0; s < child.numStates; ++s)
      if (child.accept[s]) m.addEdge(base + s, kEps, to);
  }

  void laySeq(Nfa& m, int from, const Alt& alt, size_t begin, size_t end,
              int to) {
    int cur = from;
    if (begin == end) {
      m.addEdge(from, kEps, to);
      return;
    }
    for (size_t i = begin; i < end; ++i) {
      int nxt = (i + 1 == end) ? to : m.addState();
      layFactor(m, cur, alt[i], nxt);
      cur = nxt;
    }
  }

  void buildScc(int scc) {
    if (sccProto_.count(scc)) return;
    const auto& members = sccs_[scc];
    bool rightLinear = true, leftLinear = true, anyInternal = false;
    for (const auto& name : members)
      for (const Alt& alt : gram_[name])
        for (size_t i = 0; i < alt.size(); ++i)
          if (internalRef(scc, alt[i])) {
            anyInternal = true;
            if (i + 1 != alt.size()) rightLinear = false;
            if (i != 0) leftLinear = false;
          }
    if (!anyInternal) rightLinear = leftLinear = true;

    Nfa m;
    std::map<std::string, int> entry, exit;
    if (rightLinear) {
      int fin = -1;
      for (const auto& name : members) entry[name] = m.addState();
      fin = m.addState();
      m.accept[fin] = 1;
      for (const auto& name : members)
        for (const Alt& alt : gram_[name]) {
          if (!alt.empty() && internalRef(scc, alt.back()))
            laySeq(m, entry[name], alt, 0, alt.size() - 1,
                   entry[alt.back().ref]);
          else
            laySeq(m, entry[name], alt, 0, alt.size(), fin);
        }
      sccKind_[scc] = 0;
    } else if (leftLinear) {
      int init = m.addState();
      for (const auto& name : members) exit[name] = m.addState();
      m.start = init;
      for (const auto& name : members)
        for (const Alt& alt : gram_[name]) {
          if (!alt.empty() && internalRef(scc, alt.front()))
            laySeq(m, exit[alt.front().ref], alt, 1, alt.size(), exit[name]);
          else
            laySeq(m, init, alt, 0, alt.size(), exit[name]);
        }
      sccKind_[scc] = 1;
    } else {
      // General (non-linear) group: split every rule A into an entry A and a
      // continuation A-cont, threading the body's internal references in
      // sequence; the result is right-linear over the doubled rule set and
      // recognizes a superset of the original language.
      for (const auto& name : members) {
        entry[name] = m.addState();
        exit[name] = m.addState();  // the continuation state A-cont
      }
      for (const auto& name : members)
        for (const Alt& alt : gram_[name]) {
          std::vector<size_t> cuts;
          for (size_t i = 0; i < alt.size(); ++i)
            if (internalRef(scc, alt[i])) cuts.push_back(i);
          if (cuts.empty()) {
            laySeq(m, entry[name], alt, 0, alt.size(), exit[name]);
            continue;
          }
          laySeq(m, entry[name], alt, 0, cuts[0], entry[alt[cuts[0]].ref]);
          for (size_t c = 0; c + 1 < cuts.size(); ++c)
            laySeq(m, exit[alt[cuts[c]].ref], alt, cuts[c] + 1, cuts[c + 1],
                   entry[alt[cuts[c + 1]].ref]);
          laySeq(m, exit[alt[cuts.back()].ref], alt, cuts.back() + 1,
                 alt.size(), exit[name]);
        }
      sccKind_[scc] = 2;
    }
    sccProto_[scc] = std::move(m);
    sccEntry_[scc] = std::move(entry);
    sccExit_[scc] = std::move(exit);
  }

  const Nfa& machineFor(const std::string& name) {
    auto hit = byName_.find(name);
    if (hit != byName_.end()) return hit->second;
    int scc = sccOf_.at(name);
    buildScc(scc);
    Nfa m = sccProto_.at(scc);
    switch (sccKind_.at(scc)) {
      case 0:
        m.start = sccEntry_.at(scc).at(name);
        break;
      case 1:
        std::fill(m.accept.begin(), m.accept.end(), 0);
        m.accept[sccExit_.at(scc).at(name)] = 1;
        break;
      default: {
        m.start = sccEntry_.at(scc).at(name);
        int fin = m.addState();
        m.accept[fin] = 1;
        m.addEdge(sccExit_.at(scc).at(name), kEps, fin);
        break;
      }
    }
    return byName_[name] = std::move(m);
  }
};

}  // namespace

Nfa toNfa(const LangSystem& sys, const Lang& root) {
  return Builder(sys).build(root);
}

Nfa toNfa(const LangSystem& sys, const std::string& nonterm) {
  return toNfa(sys, lNonterm(nonterm));
}

const Nfa& NfaCache::raw(const Lang& l) {
  auto it = raw_.find(l.get());
  if (it != raw_.end()) return it->second;
  pinned_[l.get()] = l;
  return raw_[l.get()] = toNfa(sys_, l);
}

const Nfa& NfaCache::simplified(const Lang& l) {
  auto it = simp_.find(l.get());
  if (it != simp_.end()) return it->second;
  return simp_[l.get()] = simplify(raw(l));
}

const Nfa& NfaCache::closure(const Lang& l) {
  auto it = clos_.find(l.get());
  if (it != clos_.end()) return it->second;
  return clos_[l.get()] = reductClosure(raw(l));
}

}  // namespace nullgc
