#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <string>
#include <vector>

#include "nullgc/grammar.hpp"
#include "nullgc/sharing.hpp"
#include "programs.hpp"

using namespace nullgc;

namespace {

using Key = std::pair<std::string, std::string>;

struct Fixture {
  ScopedProgram sp = resolveScopes(parse(testprog::kAppend));
  SharingResult res = analyzeSharing(sp);

  Lang at(int pt, const char* a, const char* b) {
    auto it = res.sharingAt[pt].find({a, b});
    REQUIRE_MESSAGE(it != res.sharingAt[pt].end(), a << "," << b);
    return it->second;
  }
  Nfa closure(const Lang& l) { return reductClosure(toNfa(res.system, l)); }
};

std::string words(const Nfa& m, int len) {
  std::string out;
  for (const Path& p : nfaEnumerate(m, len)) {
    if (!out.empty()) out += ' ';
    out += show(p);
  }
  return out;
}

std::vector<Key> keysOf(const std::map<Key, Lang>& env) {
  std::vector<Key> out;
  for (const auto& [k, v] : env) out.push_back(k);
  return out;
}

}  // namespace

TEST_CASE("transfer summaries have the expected productions") {
  Fixture f;
  CHECK(ruleAlternatives(f.res.system, "SF@append/1") ==
        std::vector<std::string>{"{00~}", "{1}\xC2\xB7"
                                 "SF@append/1\xC2\xB7{1~}"});
  CHECK(ruleAlternatives(f.res.system, "SF@append/2") ==
        std::vector<std::string>{"SF@append/2\xC2\xB7{1~}", "{e}"});
}

TEST_CASE("transfer summary languages") {
  Fixture f;
  CHECK(words(toNfa(f.res.system, "SF@append/2"), 3) == "e 1~ 1~1~ 1~1~1~");
  // Self-embedding rule: the regular cover decouples descent from return.
  CHECK(words(toNfa(f.res.system, "SF@append/1"), 4) ==
        "00~ 00~1~ 100~ 00~1~1~ 100~1~ 1100~");
}

TEST_CASE("entry summaries") {
  Fixture f;
  Nfa e11 = toNfa(f.res.system, "entry@append/1,1");
  for (const char* w : {"e", "00~", "1~1", "1~00~1", "1~1~1"})
    CHECK_MESSAGE(nfaAccepts(e11, parsePath(w)), w);
  for (const char* w : {"0", "0~", "1~0"})
    CHECK_MESSAGE(!nfaAccepts(e11, parsePath(w)), w);

  CHECK(nfaIsEmpty(toNfa(f.res.system, "entry@append/1,2")));

  Nfa e22 = toNfa(f.res.system, "entry@append/2,2");
  for (const char* w : {"e", "000~0~", "100~1~", "0100~1~0~"})
    CHECK_MESSAGE(nfaAccepts(e22, parsePath(w)), w);
}

TEST_CASE("environment inside the function body") {
  Fixture f;
  CHECK(keysOf(f.res.sharingAt[0]) ==
        std::vector<Key>{{"lst1", "lst1"}, {"lst1", "lst2"},
                         {"lst2", "lst2"}});
}

TEST_CASE("environment at the selection point") {
  Fixture f;
  CHECK(keysOf(f.res.sharingAt[29]) ==
        std::vector<Key>{{"w", "w"}, {"w", "y"}, {"w", "z"},
                         {"y", "y"}, {"z", "z"}});

  CHECK(words(f.closure(f.at(29, "z", "z")), 6) ==
        "e 000~0~ 100~1~ 0100~1~0~");
  CHECK(words(f.closure(f.at(29, "y", "y")), 4) == "e 00~");

  Nfa ww = f.closure(f.at(29, "w", "w"));
  for (const char* w : {"e", "00~", "11~", "000~0~", "100~1~"})
    CHECK_MESSAGE(nfaAccepts(ww, parsePath(w)), w);

  Nfa wy = f.closure(f.at(29, "w", "y"));
  CHECK(nfaAccepts(wy, parsePath("00~")));
  CHECK(!nfaAccepts(wy, parsePath("0")));
}

TEST_CASE("stored languages are orientation-consistent") {
  Fixture f;
  for (const auto& [k, l] : f.res.sharingAt[29]) {
    std::set<Path> fwd;
    for (const Path& p : nfaEnumerate(f.closure(l), 6))
      fwd.insert(reverse(p));
    std::set<Path> bwd;
    for (const Path& p : nfaEnumerate(f.closure(lReverse(l)), 6))
      bwd.insert(p);
    CHECK_MESSAGE(fwd == bwd, k.first << "," << k.second);
  }
}

TEST_CASE("selection makes the source and the copy share") {
  ScopedProgram sp = resolveScopes(parse(
      "(let x1 <- (cons (cons 1 nil) nil) in (let y1 <- (car x1) in y1))"));
  SharingResult res = analyzeSharing(sp);
  const Expr* use = nullptr;
  for (const Expr* e : pointExprs(sp.program))
    if (e->kind == ExprKind::Var && e->name == "y1") use = e;
  REQUIRE(use != nullptr);
  Lang l = res.sharingAt[use->point].at({"x1", "y1"});
  CHECK(nfaAccepts(reductClosure(toNfa(res.system, l)), parsePath("0")));
}

TEST_CASE("arguments derived from one variable share on entry") {
  ScopedProgram sp = resolveScopes(parse(
      "(define (f v1 v2) (prim 1 1))"
      "(let x2 <- (cons 1 nil) in (f (car x2) x2))"));
  SharingResult res = analyzeSharing(sp);
  int body = sp.program.defs[0].body.point;
  Lang l = res.sharingAt[body].at({"v1", "v2"});
  Nfa m = reductClosure(toNfa(res.system, l));
  CHECK(nfaAccepts(m, parsePath("0~")));
  CHECK(!nfaAccepts(m, parsePath("1~")));
}

TEST_CASE("a pair built from one variable shares with itself") {
  ScopedProgram sp = resolveScopes(parse(
      "(let x3 <- (cons 1 nil) in (let y3 <- (cons x3 x3) in y3))"));
  SharingResult res = analyzeSharing(sp);
  const Expr* use = nullptr;
  for (const Expr* e : pointExprs(sp.program))
    if (e->kind == ExprKind::Var && e->name == "y3") use = e;
  REQUIRE(use != nullptr);

  Nfa self = reductClosure(
      toNfa(res.system, res.sharingAt[use->point].at({"y3", "y3"})));
  CHECK(nfaAccepts(self, parsePath("01~")));
  CHECK(nfaAccepts(self, parsePath("10~")));

  Nfa cross = reductClosure(
      toNfa(res.system, res.sharingAt[use->point].at({"x3", "y3"})));
  CHECK(nfaAccepts(cross, parsePath("0~")));
  CHECK(nfaAccepts(cross, parsePath("1~")));
}

TEST_CASE("mutation forms are rejected") {
  ScopedProgram sp =
      resolveScopes(parse("(let x <- nil in (begin (set! x nil) x))"));
  CHECK_THROWS_AS(analyzeSharing(sp), AnalysisError);
}
