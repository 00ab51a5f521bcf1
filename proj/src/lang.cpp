#include "nullgc/lang.hpp"

#include <algorithm>
#include <map>

namespace nullgc {

namespace {

Lang make(LangNode n) { return std::make_shared<const LangNode>(std::move(n)); }

const Lang& emptySingleton() {
  static const Lang e = make({LangKind::Empty, {}, "", 0, {}});
  return e;
}

const Lang& varSingleton() {
  static const Lang v = make({LangKind::Var, {}, "", 0, {}});
  return v;
}

bool isLit(const Lang& l) { return l->kind == LangKind::Lit; }

}  // namespace

Lang lEmpty() { return emptySingleton(); }

Lang lLit(PathSet s) {
  s = canonicalize(s);
  if (s.empty()) return lEmpty();
  return make({LangKind::Lit, std::move(s), "", 0, {}});
}

Lang lEps() {
  static const Lang e = lLit(PathSet{Path{}});
  return e;
}

Lang lVar() { return varSingleton(); }

Lang lNonterm(std::string name) {
  return make({LangKind::Nonterm, {}, std::move(name), 0, {}});
}

Lang lUnion(std::vector<Lang> xs) {
  std::vector<Lang> kids;
  for (auto& x : xs) {
    if (!x || x->kind == LangKind::Empty) continue;
    if (x->kind == LangKind::Union)
      kids.insert(kids.end(), x->kids.begin(), x->kids.end());
    else
      kids.push_back(std::move(x));
  }
  // Merge every literal member into one set, kept at the first literal's
  // position; other members are deduplicated structurally.
  PathSet litAll;
  bool sawLit = false;
  std::vector<Lang> uniq;
  size_t litSlot = 0;
  for (auto& k : kids) {
    if (isLit(k)) {
      if (!sawLit) {
        sawLit = true;
        litSlot = uniq.size();
        uniq.push_back(nullptr);  // placeholder for the merged literal
      }
      litAll = setUnion(litAll, k->lit);
      continue;
    }
    bool dup = false;
    for (const auto& u : uniq)
      if (u && structurallyEqual(u, k)) {
        dup = true;
        break;
      }
    if (!dup) uniq.push_back(std::move(k));
  }
  if (sawLit) {
    Lang merged = lLit(std::move(litAll));
    if (merged->kind == LangKind::Empty)
      uniq.erase(uniq.begin() + static_cast<ptrdiff_t>(litSlot));
    else
      uniq[litSlot] = std::move(merged);
  }
  if (uniq.empty()) return lEmpty();
  if (uniq.size() == 1) return uniq[0];
  return make({LangKind::Union, {}, "", 0, std::move(uniq)});
}

Lang lConcat(std::vector<Lang> xs) {
  std::vector<Lang> kids;
  for (auto& x : xs) {
    if (!x || x->kind == LangKind::Empty) return lEmpty();
    if (x->kind == LangKind::Concat)
      kids.insert(kids.end(), x->kids.begin(), x->kids.end());
    else
      kids.push_back(std::move(x));
  }
  // Fold adjacent literal factors and drop {e} units.
  std::vector<Lang> folded;
  for (auto& k : kids) {
    if (isLit(k) && !folded.empty() && isLit(folded.back())) {
      PathSet merged = setConcat(folded.back()->lit, k->lit);
      folded.pop_back();
      Lang m = lLit(std::move(merged));
      if (m->kind == LangKind::Empty) return lEmpty();
      folded.push_back(std::move(m));
      continue;
    }
    if (isLit(k) && k->lit.size() == 1 && k->lit.begin()->isEps())
      continue;  // {e} is the unit
    folded.push_back(std::move(k));
  }
  if (folded.empty()) return lEps();
  if (folded.size() == 1) return folded[0];
  return make({LangKind::Concat, {}, "", 0, std::move(folded)});
}

Lang lReverse(Lang x) {
  if (!x || x->kind == LangKind::Empty) return lEmpty();
  if (x->kind == LangKind::Lit) return lLit(setReverse(x->lit));
  if (x->kind == LangKind::Reverse) return x->kids[0];
  return make({LangKind::Reverse, {}, "", 0, {std::move(x)}});
}

Lang lApply(std::string fn, int index, Lang arg) {
  return make({LangKind::Apply, {}, std::move(fn), index, {std::move(arg)}});
}

bool structurallyEqual(const Lang& a, const Lang& b) {
  if (a.get() == b.get()) return true;
  if (!a || !b || a->kind != b->kind) return false;
  switch (a->kind) {
    case LangKind::Empty:
    case LangKind::Var:
      return true;
    case LangKind::Lit:
      return a->lit == b->lit;
    case LangKind::Nonterm:
      return a->name == b->name;
    case LangKind::Apply:
      if (a->name != b->name || a->index != b->index) return false;
      [[fallthrough]];
    case LangKind::Union:
    case LangKind::Concat:
    case LangKind::Reverse: {
      if (a->kids.size() != b->kids.size()) return false;
      for (size_t i = 0; i < a->kids.size(); ++i)
        if (!structurallyEqual(a->kids[i], b->kids[i])) return false;
      return true;
    }
  }
  return false;
}

bool containsVar(const Lang& l) {
  if (!l) return false;
  if (l->kind == LangKind::Var) return true;
  for (const auto& k : l->kids)
    if (containsVar(k)) return true;
  return false;
}

Lang substVar(const Lang& l, const Lang& repl) {
  if (!containsVar(l)) return l;
  switch (l->kind) {
    case LangKind::Var:
      return repl;
    case LangKind::Union:
    case LangKind::Concat: {
      std::vector<Lang> kids;
      kids.reserve(l->kids.size());
      for (const auto& k : l->kids) kids.push_back(substVar(k, repl));
      return l->kind == LangKind::Union ? lUnion(std::move(kids))
                                        : lConcat(std::move(kids));
    }
    case LangKind::Reverse:
      return lReverse(substVar(l->kids[0], repl));
    case LangKind::Apply:
      return lApply(l->name, l->index, substVar(l->kids[0], repl));
    default:
      return l;
  }
}

std::string uName(const std::string& fn, int index) {
  return "U@" + fn + "/" + std::to_string(index);
}

std::string dName(const std::string& fn, int index) {
  return "D@" + fn + "/" + std::to_string(index);
}

Lang expandApplies(const Lang& l) {
  if (!l) return l;
  switch (l->kind) {
    case LangKind::Apply: {
      Lang arg = expandApplies(l->kids[0]);
      return lUnion({lNonterm(uName(l->name, l->index)),
                     lConcat({lNonterm(dName(l->name, l->index)), arg})});
    }
    case LangKind::Union:
    case LangKind::Concat: {
      std::vector<Lang> kids;
      bool changed = false;
      kids.reserve(l->kids.size());
      for (const auto& k : l->kids) {
        Lang e = expandApplies(k);
        changed = changed || e.get() != k.get();
        kids.push_back(std::move(e));
      }
      if (!changed) return l;
      return l->kind == LangKind::Union ? lUnion(std::move(kids))
                                        : lConcat(std::move(kids));
    }
    case LangKind::Reverse: {
      Lang k = expandApplies(l->kids[0]);
      return k.get() == l->kids[0].get() ? l : lReverse(k);
    }
    default:
      return l;
  }
}

Decomposed decompose(const Lang& l) {
  if (!containsVar(l)) return {l, lEmpty()};
  switch (l->kind) {
    case LangKind::Var:
      return {lEmpty(), lEps()};
    case LangKind::Union: {
      std::vector<Lang> us, ds;
      for (const auto& k : l->kids) {
        Decomposed p = decompose(k);
        us.push_back(p.u);
        ds.push_back(p.d);
      }
      return {lUnion(std::move(us)), lUnion(std::move(ds))};
    }
    case LangKind::Concat: {
      for (size_t i = 0; i + 1 < l->kids.size(); ++i)
        if (containsVar(l->kids[i]))
          throw LangError(
              "demand placeholder in a non-trailing factor of a "
              "concatenation");
      std::vector<Lang> prefix(l->kids.begin(), l->kids.end() - 1);
      Decomposed last = decompose(l->kids.back());
      std::vector<Lang> u = prefix, d = prefix;
      u.push_back(last.u);
      d.push_back(last.d);
      return {lConcat(std::move(u)), lConcat(std::move(d))};
    }
    case LangKind::Reverse:
      throw LangError("demand placeholder under a reversal");
    case LangKind::Apply: {
      Decomposed arg = decompose(l->kids[0]);
      Lang uNT = lNonterm(uName(l->name, l->index));
      Lang dNT = lNonterm(dName(l->name, l->index));
      return {lUnion({uNT, lConcat({dNT, arg.u})}), lConcat({dNT, arg.d})};
    }
    default:
      return {l, lEmpty()};
  }
}

namespace {

int precedence(const Lang& l) {
  switch (l->kind) {
    case LangKind::Union:
      return 0;
    case LangKind::Concat:
      return 1;
    default:
      return 2;
  }
}

void showInto(const Lang& l, std::string& out, int minPrec) {
  if (!l) {
    out += "{}";
    return;
  }
  bool paren = precedence(l) < minPrec;
  if (paren) out += "(";
  switch (l->kind) {
    case LangKind::Empty:
      out += "{}";
      break;
    case LangKind::Lit:
      out += show(l->lit);
      break;
    case LangKind::Var:
      out += "sigma";
      break;
    case LangKind::Nonterm:
      out += l->name;
      break;
    case LangKind::Union:
      for (size_t i = 0; i < l->kids.size(); ++i) {
        if (i) out += " | ";
        showInto(l->kids[i], out, 1);
      }
      break;
    case LangKind::Concat:
      for (size_t i = 0; i < l->kids.size(); ++i) {
        if (i) out += "\xC2\xB7";  // middle dot
        showInto(l->kids[i], out, 2);
      }
      break;
    case LangKind::Reverse:
      out += "rev(";
      showInto(l->kids[0], out, 0);
      out += ")";
      break;
    case LangKind::Apply:
      out += "LF@" + l->name + "/" + std::to_string(l->index) + "(";
      showInto(l->kids[0], out, 0);
      out += ")";
      break;
  }
  if (paren) out += ")";
}

}  // namespace

std::string show(const Lang& l) {
  std::string out;
  showInto(l, out, 0);
  return out;
}

std::vector<std::string> ruleAlternatives(const LangSystem& sys,
                                          const std::string& name) {
  std::vector<std::string> out;
  auto it = sys.rules.find(name);
  if (it == sys.rules.end()) return out;
  const Lang& body = it->second;
  if (body->kind == LangKind::Union) {
    for (const auto& k : body->kids) out.push_back(show(k));
  } else {
    out.push_back(show(body));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace nullgc
