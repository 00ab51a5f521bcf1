#include "nullgc/liveness.hpp"

#include <utility>

namespace nullgc {

namespace {

using Env = std::map<std::string, Lang>;

Lang lookup(const Env& env, const std::string& v) {
  auto it = env.find(v);
  return it == env.end() ? lEmpty() : it->second;
}

Lang symLit(const char* word) { return lLit(PathSet{parsePath(word)}); }

// One backward pass over an expression: threads the environment right to
// left through siblings, so at any point the environment holds the demands
// of everything evaluated after it. `sigma` is the demand on the value of
// `e` itself.
class Walker {
 public:
  Walker(const ScopedProgram& sp, LivenessResult* out, bool annotate,
         std::map<std::string, std::vector<Lang>>* exitContribs)
      : sp_(sp), out_(out), annotate_(annotate), contribs_(exitContribs) {}

  Env le(const Expr& e, const Lang& sigma, Env env) {
    switch (e.kind) {
      case ExprKind::Const:
      case ExprKind::Nil:
        break;
      case ExprKind::Var:
        env[e.name] = lUnion({lookup(env, e.name), sigma});
        break;
      case ExprKind::Car:
      case ExprKind::Cdr: {
        const char* step = e.kind == ExprKind::Car ? "0" : "1";
        Lang kidDemand = lUnion({lEps(), lConcat({symLit(step), sigma})});
        env = le(e.kids[0], kidDemand, std::move(env));
        break;
      }
      case ExprKind::PairQ:
      case ExprKind::NullQ:
        env = le(e.kids[0], lEps(), std::move(env));
        break;
      case ExprKind::Prim:
        env = le(e.kids[1], lEps(), std::move(env));
        env = le(e.kids[0], lEps(), std::move(env));
        break;
      case ExprKind::Cons:
        env = le(e.kids[1], lConcat({symLit("1~"), sigma}), std::move(env));
        env = le(e.kids[0], lConcat({symLit("0~"), sigma}), std::move(env));
        break;
      case ExprKind::If: {
        Env thenEnv = le(e.kids[1], sigma, env);
        Env elseEnv = le(e.kids[2], sigma, std::move(env));
        for (auto& [v, l] : thenEnv)
          elseEnv[v] = lUnion({lookup(elseEnv, v), l});
        env = le(e.kids[0], lEps(), std::move(elseEnv));
        break;
      }
      case ExprKind::Let: {
        Env bodyEnv = le(e.kids[1], sigma, std::move(env));
        Lang bound = lookup(bodyEnv, e.name);
        bodyEnv.erase(e.name);
        env = le(e.kids[0], bound, std::move(bodyEnv));
        break;
      }
      case ExprKind::Call: {
        if (contribs_) (*contribs_)[e.name].push_back(sigma);
        for (size_t i = e.kids.size(); i >= 1; --i)
          env = le(e.kids[i - 1],
                   lApply(e.name, static_cast<int>(i), sigma), std::move(env));
        break;
      }
      default:
        throw AnalysisError("liveness analysis does not cover mutation forms");
    }
    if (annotate_) {
      out_->demandAt[e.point] = sigma;
      std::map<std::string, Lang> vis;
      for (const std::string& v : sp_.visible[e.point]) {
        auto it = env.find(v);
        if (it != env.end() && it->second->kind != LangKind::Empty)
          vis[v] = it->second;
      }
      out_->liveAt[e.point] = std::move(vis);
    }
    return env;
  }

 private:
  const ScopedProgram& sp_;
  LivenessResult* out_;
  bool annotate_;
  std::map<std::string, std::vector<Lang>>* contribs_;
};

}  // namespace

LivenessResult analyzeLiveness(const ScopedProgram& sp) {
  const Program& p = sp.program;
  LivenessResult out;
  out.liveAt.resize(p.pointCount);
  out.demandAt.assign(p.pointCount, lEmpty());

  // Pass one: per-parameter demand summaries. Walking a body against a demand
  // placeholder yields, for each parameter, a language over the placeholder;
  // splitting it into closed and propagated parts gives the U/D rules.
  for (const FunctionDef& def : p.defs) {
    Walker summarize(sp, &out, false, nullptr);
    Env params = summarize.le(def.body, lVar(), Env{});
    for (size_t i = 0; i < def.params.size(); ++i) {
      Decomposed d = decompose(lookup(params, def.params[i]));
      int index = static_cast<int>(i) + 1;
      out.system.rules[uName(def.name, index)] = d.u;
      out.system.rules[dName(def.name, index)] = d.d;
    }
  }

  // Pass two: annotate every point. The program body runs against the unknown
  // consumer of the program value; each function body runs against the union
  // of the demands recorded at its call sites, named exit@f. The program walk
  // comes first so its call demands are in place before bodies are walked.
  out.system.rules["pgm"] =
      lUnion({lEps(), lConcat({symLit("0"), lNonterm("pgm")}),
              lConcat({symLit("1"), lNonterm("pgm")})});
  std::map<std::string, std::vector<Lang>> exitContribs;
  for (const FunctionDef& def : p.defs) exitContribs[def.name];

  Walker annotate(sp, &out, true, &exitContribs);
  annotate.le(p.body, lNonterm("pgm"), Env{});
  for (const FunctionDef& def : p.defs)
    annotate.le(def.body, lNonterm("exit@" + def.name), Env{});

  for (const FunctionDef& def : p.defs)
    out.system.rules["exit@" + def.name] = lUnion(exitContribs[def.name]);
  return out;
}

}  // namespace nullgc
