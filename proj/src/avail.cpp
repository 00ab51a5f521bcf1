#include "nullgc/avail.hpp"

#include <map>
#include <string>
#include <vector>

namespace nullgc {
namespace {

using Env = std::map<std::string, PathSet>;

PathSet one(const char* w) { return PathSet{parsePath(w)}; }

PathSet epsSet() { return PathSet{Path::eps()}; }

Env intersectEnvs(const Env& a, const Env& b) {
  Env out;
  for (const auto& [v, s] : a) {
    auto it = b.find(v);
    if (it == b.end()) continue;
    PathSet meet;
    for (const Path& p : s)
      if (it->second.count(p)) meet.insert(p);
    out[v] = std::move(meet);
  }
  return out;
}

class Walker {
 public:
  Walker(const ScopedProgram& sp, AvailResult* out) : sp_(sp), out_(out) {}

  PathSet ae(const Expr& e, const PathSet& sigma, Env& env) {
    PathSet alpha;
    switch (e.kind) {
      case ExprKind::Const:
        alpha = epsSet();
        break;
      case ExprKind::Nil:
        alpha = sigma;
        break;
      case ExprKind::Var: {
        PathSet& slot = env[e.name];
        slot = setUnion(slot, sigma);
        alpha = slot;
        break;
      }
      case ExprKind::Car:
      case ExprKind::Cdr: {
        PathSet a1 = ae(e.kids[0], availThrough(e.kind, 1, sigma), env);
        alpha = setUnion(sigma, availBack(e.kind, 1, a1));
        break;
      }
      case ExprKind::Cons: {
        PathSet a1 = ae(e.kids[0], availThrough(e.kind, 1, sigma), env);
        PathSet a2 = ae(e.kids[1], availThrough(e.kind, 2, sigma), env);
        alpha = setUnion(sigma, setUnion(availBack(e.kind, 1, a1),
                                         availBack(e.kind, 2, a2)));
        break;
      }
      case ExprKind::NullQ:
      case ExprKind::PairQ:
        ae(e.kids[0], {}, env);
        alpha = sigma;
        break;
      case ExprKind::Prim:
        ae(e.kids[0], {}, env);
        ae(e.kids[1], {}, env);
        alpha = sigma;
        break;
      case ExprKind::If: {
        ae(e.kids[0], epsSet(), env);
        Env thenEnv = env;
        Env elseEnv = env;
        PathSet a2 = ae(e.kids[1], sigma, thenEnv);
        PathSet a3 = ae(e.kids[2], sigma, elseEnv);
        env = intersectEnvs(thenEnv, elseEnv);
        PathSet meet;
        for (const Path& p : a2)
          if (a3.count(p)) meet.insert(p);
        alpha = setUnion(sigma, meet);
        break;
      }
      case ExprKind::Let: {
        PathSet a1 = ae(e.kids[0], {}, env);
        env[e.name] = a1;
        alpha = ae(e.kids[1], sigma, env);
        env.erase(e.name);
        break;
      }
      case ExprKind::Call: {
        for (const Expr& k : e.kids) ae(k, {}, env);
        alpha = sigma;
        break;
      }
      default:
        throw AnalysisError(
            "availability analysis does not cover mutation forms");
    }
    out_->demandAt[e.point] = sigma;
    annotate(e.point, env);
    return alpha;
  }

 private:
  void annotate(ProgramPoint pt, const Env& env) {
    for (const std::string& v : sp_.visible[pt]) {
      auto it = env.find(v);
      if (it != env.end() && !it->second.empty())
        out_->availAt[pt][v] = it->second;
    }
  }

  const ScopedProgram& sp_;
  AvailResult* out_;
};

}  // namespace

PathSet availThrough(ExprKind op, int i, const PathSet& demand) {
  switch (op) {
    case ExprKind::Car:
      return setUnion(epsSet(), setConcat(one("0"), demand));
    case ExprKind::Cdr:
      return setUnion(epsSet(), setConcat(one("1"), demand));
    case ExprKind::Cons:
      return setConcat(one(i == 1 ? "0~" : "1~"), demand);
    default:
      return {};
  }
}

PathSet availBack(ExprKind op, int i, const PathSet& avail) {
  switch (op) {
    case ExprKind::Car:
      return setConcat(one("0~"), avail);
    case ExprKind::Cdr:
      return setConcat(one("1~"), avail);
    case ExprKind::Cons:
      return setUnion(epsSet(), setConcat(one(i == 1 ? "0" : "1"), avail));
    default:
      return {};
  }
}

AvailResult analyzeAvail(const ScopedProgram& sp) {
  const Program& p = sp.program;
  AvailResult out;
  out.availAt.resize(p.pointCount);
  out.demandAt.resize(p.pointCount);

  Walker w(sp, &out);
  for (const FunctionDef& def : p.defs) {
    Env env;
    w.ae(def.body, {}, env);
  }
  Env env;
  w.ae(p.body, {}, env);
  return out;
}

}  // namespace nullgc
