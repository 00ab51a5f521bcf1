#include "nullgc/sharing.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace nullgc {
namespace {

using Key = std::pair<std::string, std::string>;
using Env = std::map<Key, Lang>;

Lang lit(const char* w) { return lLit(PathSet{parsePath(w)}); }

Lang getS(const Env& s, const std::string& a, const std::string& b) {
  if (a <= b) {
    auto it = s.find({a, b});
    return it == s.end() ? lEmpty() : it->second;
  }
  auto it = s.find({b, a});
  return it == s.end() ? lEmpty() : lReverse(it->second);
}

void setS(Env& s, const std::string& a, const std::string& b, const Lang& l) {
  if (a <= b)
    s[{a, b}] = l;
  else
    s[{b, a}] = lReverse(l);
}

std::string sfName(const std::string& f, int i) {
  return "SF@" + f + "/" + std::to_string(i);
}

std::string entryName(const std::string& f, int i, int j) {
  return "entry@" + f + "/" + std::to_string(i) + "," + std::to_string(j);
}

[[noreturn]] void reject() {
  throw AnalysisError("sharing analysis does not cover mutation forms");
}

class Walker {
 public:
  Walker(const ScopedProgram& sp, SharingResult* out,
         std::map<std::string, std::vector<Lang>>* contribs)
      : sp_(sp), out_(out), contribs_(contribs) {}

  // Paths from x's cell to the cell of e's value.
  Lang se(const std::string& x, const Expr& e, const Env& s) {
    switch (e.kind) {
      case ExprKind::Const:
      case ExprKind::Nil:
      case ExprKind::NullQ:
      case ExprKind::PairQ:
      case ExprKind::Prim:
        return lEmpty();
      case ExprKind::Var:
        return getS(s, x, e.name);
      case ExprKind::Cons:
        return lUnion({lConcat({se(x, e.kids[0], s), lit("0~")}),
                       lConcat({se(x, e.kids[1], s), lit("1~")})});
      case ExprKind::Car:
        return lConcat({se(x, e.kids[0], s), lit("0")});
      case ExprKind::Cdr:
        return lConcat({se(x, e.kids[0], s), lit("1")});
      case ExprKind::If:
        return lUnion({se(x, e.kids[1], s), se(x, e.kids[2], s)});
      case ExprKind::Let:
        return se(x, e.kids[1], letUpdate(e, s));
      case ExprKind::Call: {
        std::vector<Lang> parts;
        for (size_t i = 0; i < e.kids.size(); ++i)
          parts.push_back(lConcat(
              {se(x, e.kids[i], s), lNonterm(sfName(e.name, int(i) + 1))}));
        return lUnion(parts);
      }
      default:
        reject();
    }
  }

  // Paths from the cell of e's value back to that same cell.
  Lang ss(const Expr& e, const Env& s) {
    switch (e.kind) {
      case ExprKind::Const:
        return lEps();
      case ExprKind::Nil:
      case ExprKind::NullQ:
      case ExprKind::PairQ:
      case ExprKind::Prim:
        return lEmpty();
      case ExprKind::Var:
        return getS(s, e.name, e.name);
      case ExprKind::Cons: {
        const Expr& a = e.kids[0];
        const Expr& b = e.kids[1];
        return lUnion({lConcat({lit("0"), ss(a, s), lit("0~")}),
                       lConcat({lit("0"), shr(a, b, s, e.point), lit("1~")}),
                       lConcat({lit("1"), shr(b, a, s, e.point), lit("0~")}),
                       lConcat({lit("1"), ss(b, s), lit("1~")})});
      }
      case ExprKind::Car:
        return lConcat({lit("0~"), ss(e.kids[0], s), lit("0")});
      case ExprKind::Cdr:
        return lConcat({lit("1~"), ss(e.kids[0], s), lit("1")});
      case ExprKind::If:
        return lUnion({ss(e.kids[1], s), ss(e.kids[2], s)});
      case ExprKind::Let:
        return ss(e.kids[1], letUpdate(e, s));
      case ExprKind::Call: {
        int n = int(e.kids.size());
        std::vector<Lang> parts;
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            Lang mid = i == j ? ss(e.kids[i], s)
                              : shr(e.kids[i], e.kids[j], s, e.point);
            parts.push_back(
                lConcat({lReverse(lNonterm(sfName(e.name, i + 1))), mid,
                         lNonterm(sfName(e.name, j + 1))}));
          }
        return lUnion(parts);
      }
      default:
        reject();
    }
  }

  // Paths from the cell of a's value to the cell of b's value, routed
  // through some variable visible at the given point.
  Lang shr(const Expr& a, const Expr& b, const Env& s, ProgramPoint pt) {
    std::vector<Lang> parts;
    for (const std::string& x : sp_.visible[pt])
      parts.push_back(lConcat({lReverse(se(x, a, s)), se(x, b, s)}));
    return lUnion(parts);
  }

  Env letUpdate(const Expr& e, const Env& s) {
    Env out = s;
    setS(out, e.name, e.name, lUnion({lEps(), ss(e.kids[0], s)}));
    for (const std::string& x : sp_.visible[e.point])
      setS(out, x, e.name, se(x, e.kids[0], s));
    return out;
  }

  void walk(const Expr& e, const Env& s) {
    annotate(e, s);
    switch (e.kind) {
      case ExprKind::Let: {
        walk(e.kids[0], s);
        walk(e.kids[1], letUpdate(e, s));
        return;
      }
      case ExprKind::Call:
        if (contribs_) {
          int n = int(e.kids.size());
          for (int i = 0; i < n; ++i) {
            (*contribs_)[entryName(e.name, i + 1, i + 1)].push_back(
                ss(e.kids[i], s));
            for (int j = i + 1; j < n; ++j)
              (*contribs_)[entryName(e.name, i + 1, j + 1)].push_back(
                  shr(e.kids[i], e.kids[j], s, e.point));
          }
        }
        break;
      case ExprKind::SetRoot:
      case ExprKind::SetCar:
      case ExprKind::SetCdr:
      case ExprKind::Begin:
        reject();
      default:
        break;
    }
    for (const Expr& k : e.kids) walk(k, s);
  }

 private:
  void annotate(const Expr& e, const Env& s) {
    if (!out_) return;
    const std::vector<std::string>& vis = sp_.visible[e.point];
    auto visible = [&vis](const std::string& v) {
      for (const std::string& w : vis)
        if (w == v) return true;
      return false;
    };
    std::map<Key, Lang>& slot = out_->sharingAt[e.point];
    for (const auto& [k, l] : s) {
      if (l->kind == LangKind::Empty) continue;
      if (visible(k.first) && visible(k.second)) slot[k] = l;
    }
  }

  const ScopedProgram& sp_;
  SharingResult* out_;
  std::map<std::string, std::vector<Lang>>* contribs_;
};

}  // namespace

SharingResult analyzeSharing(const ScopedProgram& sp) {
  const Program& p = sp.program;
  SharingResult out;
  out.sharingAt.resize(p.pointCount);

  // Transfer summaries: paths from each parameter into the returned value,
  // assuming parameters only share with themselves.
  Walker query(sp, nullptr, nullptr);
  for (const FunctionDef& def : p.defs) {
    Env diag;
    for (const std::string& prm : def.params) setS(diag, prm, prm, lEps());
    for (size_t i = 0; i < def.params.size(); ++i)
      out.system.rules[sfName(def.name, int(i) + 1)] =
          query.se(def.params[i], def.body, diag);
  }

  // Entry summaries: sharing among arguments, accumulated over call sites.
  // The program body is walked first with a concrete environment; each
  // function body is walked under its own entry assumptions.
  std::map<std::string, std::vector<Lang>> contribs;
  Walker walker(sp, &out, &contribs);
  walker.walk(p.body, Env{});
  for (const FunctionDef& def : p.defs) {
    Env s0;
    int n = int(def.params.size());
    for (int i = 0; i < n; ++i) {
      setS(s0, def.params[i], def.params[i],
           lNonterm(entryName(def.name, i + 1, i + 1)));
      for (int j = i + 1; j < n; ++j)
        setS(s0, def.params[i], def.params[j],
             lNonterm(entryName(def.name, i + 1, j + 1)));
    }
    walker.walk(def.body, s0);
  }

  for (const FunctionDef& def : p.defs) {
    int n = int(def.params.size());
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        std::vector<Lang> alts = contribs[entryName(def.name, i + 1, j + 1)];
        if (i == j) alts.insert(alts.begin(), lEps());
        out.system.rules[entryName(def.name, i + 1, j + 1)] = lUnion(alts);
      }
  }
  return out;
}

}  // namespace nullgc
