#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <deque>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "nullgc/grammar.hpp"
#include "nullgc/lang.hpp"
#include "nullgc/nfa.hpp"

using namespace nullgc;

namespace {

Path rp(const std::string& s) { return parsePath(s); }

std::vector<Path> rps(std::initializer_list<const char*> words) {
  std::vector<Path> out;
  for (const char* w : words) out.push_back(rp(w));
  return out;
}

PathSet ps(std::initializer_list<const char*> words) {
  PathSet s;
  for (const char* w : words) s.insert(rp(w));
  return s;
}

Lang lit(std::initializer_list<const char*> words) { return lLit(ps(words)); }

// A machine accepting exactly the given words, none of them reduced first.
Nfa rawWords(std::initializer_list<const char*> words) {
  Nfa m = nfaEmpty();
  bool first = true;
  for (const char* w : words) {
    Nfa one = nfaWord(rp(w));
    m = first ? one : nfaUnion(m, one);
    first = false;
  }
  return m;
}

std::vector<Path> allWords(int maxLen) {
  std::vector<Path> out{Path::eps()};
  size_t levelBegin = 0;
  for (int len = 1; len <= maxLen; ++len) {
    size_t levelEnd = out.size();
    for (size_t i = levelBegin; i < levelEnd; ++i)
      for (int s = 0; s < 4; ++s) {
        Path p = out[i];
        p.syms.push_back(static_cast<Sym>(s));
        out.push_back(std::move(p));
      }
    levelBegin = levelEnd;
  }
  std::sort(out.begin(), out.end());
  return out;
}

Nfa randomNfa(uint32_t seed, bool withEps) {
  std::mt19937 rng(seed);
  Nfa m = nfaEmpty();
  int n = 2 + static_cast<int>(rng() % 6);
  while (m.numStates < n) m.addState();
  int labels = withEps ? 5 : 4;
  int edges = n + static_cast<int>(rng() % (2 * n));
  for (int i = 0; i < edges; ++i)
    m.addEdge(static_cast<int>(rng() % n), static_cast<int>(rng() % labels),
              static_cast<int>(rng() % n));
  for (int s = 0; s < n; ++s) m.accept[s] = rng() % 3 == 0;
  return m;
}

// Appends one selector to an already-reduced path, reducing incrementally.
// Returns false when the result collapses to bottom.
bool pushStep(Path& stack, Sym s) {
  if (isForward(s) && !stack.syms.empty() && isBarred(stack.syms.back())) {
    if (stack.syms.back() == bar(s)) {
      stack.syms.pop_back();
      return true;
    }
    return false;
  }
  stack.syms.push_back(s);
  return true;
}

// Full reducts of accepted words, found by walking (state, reduced prefix)
// configurations directly. Bounded in stack depth and visited configurations,
// so it underapproximates; everything it finds must appear in the closure.
std::set<Path> configReducts(const Nfa& raw, size_t maxStack, size_t maxCfgs) {
  Nfa m = nfaEpsFree(raw);
  std::set<std::pair<int, std::string>> seen;
  std::deque<std::pair<int, Path>> work;
  std::set<Path> out;
  work.emplace_back(m.start, Path::eps());
  seen.insert({m.start, "e"});
  while (!work.empty() && seen.size() < maxCfgs) {
    auto [state, stack] = work.front();
    work.pop_front();
    if (m.accept[state]) out.insert(stack);
    for (int sym = 0; sym < 4; ++sym)
      for (int to : m.next[state][sym]) {
        Path nextStack = stack;
        if (!pushStep(nextStack, static_cast<Sym>(sym))) continue;
        if (nextStack.size() > maxStack) continue;
        auto key = std::make_pair(to, show(nextStack));
        if (seen.insert(key).second) work.emplace_back(to, nextStack);
      }
  }
  return out;
}

// Independent take on the saturation: find, by a direct configuration walk,
// every state pair linked by a run whose word cancels to the empty path, and
// add those pairs as epsilon edges. A word that reduces to epsilon keeps a
// pure-barred stack at every prefix, so other configurations are pruned.
Nfa gapOracle(const Nfa& raw, size_t maxStack, size_t maxCfgs) {
  Nfa m = nfaEpsFree(raw);
  Nfa out = m;
  for (int src = 0; src < m.numStates; ++src) {
    std::set<std::pair<int, std::string>> seen{{src, "e"}};
    std::deque<std::pair<int, Path>> work;
    work.emplace_back(src, Path::eps());
    while (!work.empty() && seen.size() < maxCfgs) {
      auto [state, stack] = work.front();
      work.pop_front();
      if (state != src && stack.isEps() && !out.hasEdge(src, kEps, state))
        out.addEdge(src, kEps, state);
      for (int sym = 0; sym < 4; ++sym)
        for (int to : m.next[state][sym]) {
          Path nextStack = stack;
          if (!pushStep(nextStack, static_cast<Sym>(sym))) continue;
          if (nextStack.size() > maxStack) continue;
          if (!nextStack.syms.empty() && isForward(nextStack.syms.front()))
            continue;  // a forward symbol at the bottom can never cancel
          auto key = std::make_pair(to, show(nextStack));
          if (seen.insert(key).second) work.emplace_back(to, nextStack);
        }
    }
  }
  return out;
}

bool pureForward(const Path& p) {
  return std::all_of(p.syms.begin(), p.syms.end(),
                     [](Sym s) { return isForward(s); });
}

}  // namespace

TEST_CASE("word and set machines accept exactly their members") {
  Nfa w = nfaWord(rp("010~"));
  CHECK(nfaAccepts(w, rp("010~")));
  CHECK(!nfaAccepts(w, rp("01")));
  CHECK(!nfaAccepts(w, Path::eps()));

  Nfa s = nfaFromSet(ps({"e", "0", "10"}));
  CHECK(nfaAccepts(s, Path::eps()));
  CHECK(nfaAccepts(s, rp("10")));
  CHECK(!nfaAccepts(s, rp("1")));
  CHECK(nfaEnumerate(s, 4) == rps({"e", "0", "10"}));

  CHECK(nfaIsEmpty(nfaEmpty()));
  CHECK(nfaEnumerate(nfaEpsilon(), 2) == rps({"e"}));
}

TEST_CASE("enumerate returns shortlex order and honors the cap") {
  Nfa m = nfaFromSet(ps({"1", "0", "00", "1~", "0~", "e"}));
  CHECK(nfaEnumerate(m, 2) == rps({"e", "0", "1", "0~", "1~", "00"}));
  CHECK(nfaEnumerate(m, 2, 3) == rps({"e", "0", "1"}));
  CHECK(nfaEnumerate(m, 0) == rps({"e"}));
}

TEST_CASE("union concat and reverse behave as word operations") {
  Nfa a = nfaFromSet(ps({"0", "1"}));
  Nfa b = nfaFromSet(ps({"e", "10"}));
  CHECK(nfaEnumerate(nfaUnion(a, b), 3) == rps({"e", "0", "1", "10"}));
  // Concatenation of machines does not reduce across the seam.
  Nfa ab = nfaConcat(a, b);
  CHECK(nfaEnumerate(ab, 3) == rps({"0", "1", "010", "110"}));
  Nfa r = nfaReverse(ab);
  CHECK(nfaEnumerate(r, 3) == rps({"0~", "1~", "0~1~0~", "0~1~1~"}));

  Nfa unreduced = nfaConcat(nfaWord(rp("0")), nfaWord(rp("0~")));
  CHECK(nfaEnumerate(unreduced, 3) == rps({"00~"}));
  Nfa cancelling = nfaConcat(nfaWord(rp("0~")), nfaWord(rp("0")));
  CHECK(nfaEnumerate(cancelling, 3) == rps({"0~0"}));  // still unreduced
}

TEST_CASE("filter machines classify word shapes") {
  Nfa fwd = nfaForwardUniverse();
  CHECK(nfaAccepts(fwd, Path::eps()));
  CHECK(nfaAccepts(fwd, rp("0110")));
  CHECK(!nfaAccepts(fwd, rp("00~")));

  Nfa canon = nfaCanonicalShape();
  for (const char* w : {"e", "0", "10", "0~", "0~1~", "00~", "100~1~"})
    CHECK_MESSAGE(nfaAccepts(canon, rp(w)), w);
  for (const char* w : {"0~1", "1~0", "00~1", "0~10~"})
    CHECK_MESSAGE(!nfaAccepts(canon, rp(w)), w);

  Nfa mixed = nfaMixedOrEps();
  for (const char* w : {"e", "00~", "0~0", "010~", "1~1~0"})
    CHECK_MESSAGE(nfaAccepts(mixed, rp(w)), w);
  for (const char* w : {"0", "1", "11", "0~", "1~1~"})
    CHECK_MESSAGE(!nfaAccepts(mixed, rp(w)), w);

  // Every word of length <= 3 agrees with the direct definitions.
  for (const Path& w : allWords(3)) {
    CHECK(nfaAccepts(fwd, w) == pureForward(w));
    CHECK(nfaAccepts(canon, w) == isCanonical(w));
    bool hasFwd = std::any_of(w.syms.begin(), w.syms.end(), isForward);
    bool hasBwd = std::any_of(w.syms.begin(), w.syms.end(), isBarred);
    CHECK(nfaAccepts(mixed, w) == (w.isEps() || (hasFwd && hasBwd)));
  }
}

TEST_CASE("epsilon removal and trimming preserve the language") {
  for (uint32_t seed = 1; seed <= 25; ++seed) {
    Nfa m = randomNfa(seed, true);
    std::vector<Path> want = nfaEnumerate(m, 4);
    CHECK(nfaEnumerate(nfaEpsFree(m), 4) == want);
    CHECK(nfaEnumerate(nfaTrim(m), 4) == want);
    CHECK(nfaIsEmpty(m) == want.empty());
  }
}

TEST_CASE("intersection agrees with enumeration") {
  for (uint32_t seed = 1; seed <= 25; ++seed) {
    Nfa a = randomNfa(seed, true);
    Nfa b = randomNfa(seed + 1000, true);
    std::vector<Path> wa = nfaEnumerate(a, 4);
    std::vector<Path> wb = nfaEnumerate(b, 4);
    std::vector<Path> both;
    std::set_intersection(wa.begin(), wa.end(), wb.begin(), wb.end(),
                          std::back_inserter(both));
    std::sort(both.begin(), both.end());
    std::vector<Path> got = nfaEnumerate(nfaIntersect(a, b), 4);
    CHECK(got == both);
    if (!both.empty()) CHECK(!nfaIntersectEmpty(a, b));
    CHECK(nfaIntersectEmpty(a, b) == nfaIsEmpty(nfaIntersect(a, b)));
  }
}

TEST_CASE("acceptance agrees with enumeration on all short words") {
  for (uint32_t seed = 1; seed <= 10; ++seed) {
    Nfa m = randomNfa(seed, true);
    std::set<Path> in;
    for (const Path& w : nfaEnumerate(m, 3)) in.insert(w);
    for (const Path& w : allWords(3))
      CHECK(nfaAccepts(m, w) == (in.count(w) > 0));
  }
}

TEST_CASE("simplification handles fixed seam and nesting cases") {
  // 0 0~ 0 has a single redex at the end: the reduct is 0.
  Nfa a = rawWords({"00~0"});
  CHECK(nfaEnumerate(simplify(a), 4) == rps({"0"}));
  CHECK(nfaEnumerate(reductClosure(a), 4) == rps({"0", "00~0"}));

  // 0~ 1 collapses to bottom: no forward reduct survives.
  Nfa b = rawWords({"0~1"});
  CHECK(nfaIsEmpty(simplify(b)));
  CHECK(nfaEnumerate(reductClosure(b), 4) == rps({"0~1"}));

  // Nested cancellation 0~ 1~ 1 0 needs a bridge across a bridge.
  Nfa c = rawWords({"0~1~10"});
  CHECK(nfaEnumerate(simplify(c), 4) == rps({"e"}));
  CHECK(nfaEnumerate(reductClosure(c), 5) == rps({"e", "0~0", "0~1~10"}));

  // Simplified machines never accept a barred selector.
  for (uint32_t seed = 1; seed <= 20; ++seed)
    for (const Path& w : nfaEnumerate(simplify(randomNfa(seed, true)), 4))
      CHECK(pureForward(w));
}

TEST_CASE("closure and simplification cover every reachable reduct") {
  for (uint32_t seed = 1; seed <= 40; ++seed) {
    Nfa raw = randomNfa(seed, true);
    Nfa closed = reductClosure(raw);
    Nfa simp = simplify(raw);

    // Everything the machine accepted before is still accepted, and the
    // stack-scan reduct of every short word appears too.
    for (const Path& w : nfaEnumerate(raw, 6, 1500)) {
      CHECK(nfaAccepts(closed, w));
      Path r = reduce(w);
      if (r.isBottom()) continue;
      CHECK_MESSAGE(nfaAccepts(closed, r), show(w) << " reduct " << show(r));
      if (pureForward(r))
        CHECK_MESSAGE(nfaAccepts(simp, r), show(w) << " reduct " << show(r));
    }

    // Configuration walk: reducts of arbitrarily long accepted words, found
    // without the closure machinery.
    for (const Path& r : configReducts(raw, 8, 60000)) {
      if (r.size() > 6) continue;
      CHECK_MESSAGE(nfaAccepts(closed, r), "config reduct " << show(r));
      if (pureForward(r))
        CHECK_MESSAGE(nfaAccepts(simp, r), "config reduct " << show(r));
    }
  }
}

TEST_CASE("closure and simplification match the pushdown oracle exactly") {
  for (uint32_t seed = 1; seed <= 40; ++seed) {
    Nfa raw = randomNfa(seed, true);
    Nfa oracle = gapOracle(raw, 16, 150000);
    std::vector<Path> oracleWords = nfaEnumerate(oracle, 4);
    CHECK_MESSAGE(nfaEnumerate(reductClosure(raw), 4) == oracleWords,
                  "seed " << seed);
    std::vector<Path> oracleFwd;
    for (const Path& w : oracleWords)
      if (pureForward(w)) oracleFwd.push_back(w);
    CHECK_MESSAGE(nfaEnumerate(simplify(raw), 4) == oracleFwd,
                  "seed " << seed);
  }
}

TEST_CASE("self-embedding rules get the regular over-approximation") {
  LangSystem sys;
  sys.rules["SF1"] = lUnion(
      {lit({"00~"}), lConcat({lit({"1"}), lNonterm("SF1"), lit({"1~"})})});
  Nfa m = toNfa(sys, "SF1");
  for (const char* w : {"00~", "100~1~", "1100~1~1~"})
    CHECK_MESSAGE(nfaAccepts(m, rp(w)), w);
  // The approximation decouples the two sides: 1^a 00~ 1~^b for any a, b.
  CHECK(nfaEnumerate(m, 4) ==
        rps({"00~", "00~1~", "100~", "00~1~1~", "100~1~", "1100~"}));
}

TEST_CASE("one-sided recursion is translated exactly") {
  LangSystem sys;
  sys.rules["D2"] = lUnion({lit({"e"}), lConcat({lNonterm("D2"), lit({"1~"})})});
  sys.rules["U1"] = lUnion({lit({"e"}), lConcat({lit({"1"}), lNonterm("U1")})});
  CHECK(nfaEnumerate(toNfa(sys, "D2"), 3) == rps({"e", "1~", "1~1~", "1~1~1~"}));
  CHECK(nfaEnumerate(toNfa(sys, "U1"), 2) == rps({"e", "1", "11"}));
}

TEST_CASE("references across rule groups embed the child machine") {
  LangSystem sys;
  sys.rules["A"] = lConcat({lit({"0"}), lNonterm("B")});
  sys.rules["B"] = lUnion({lit({"e"}), lConcat({lit({"1"}), lNonterm("B")})});
  CHECK(nfaEnumerate(toNfa(sys, "A"), 3) == rps({"0", "01", "011"}));

  sys.rules["X"] = lUnion({lit({"e"}), lConcat({lit({"0"}), lNonterm("Y")})});
  sys.rules["Y"] = lConcat({lit({"1"}), lNonterm("X")});
  CHECK(nfaEnumerate(toNfa(sys, "X"), 4) == rps({"e", "01", "0101"}));
}

TEST_CASE("apply nodes and reversals are resolved during conversion") {
  LangSystem sys;
  sys.rules["Q"] = lApply("f", 1, lit({"e"}));
  sys.rules["U@f/1"] = lit({"0"});
  sys.rules["D@f/1"] = lit({"1"});
  CHECK(nfaEnumerate(toNfa(sys, "Q"), 2) == rps({"0", "1"}));

  sys.rules["B2"] = lUnion({lit({"e"}), lConcat({lit({"0"}), lNonterm("B2")})});
  sys.rules["S2"] = lReverse(lNonterm("B2"));
  CHECK(nfaEnumerate(toNfa(sys, "S2"), 2) == rps({"e", "0~", "0~0~"}));

  CHECK_THROWS_AS(toNfa(sys, lVar()), LangError);
  sys.rules["R"] = lVar();
  CHECK_THROWS_AS(toNfa(sys, "R"), LangError);
  CHECK_THROWS_AS(toNfa(sys, "missing"), LangError);
}

TEST_CASE("the query cache returns one machine per node") {
  LangSystem sys;
  sys.rules["B"] = lUnion({lit({"e"}), lConcat({lit({"1"}), lNonterm("B")})});
  NfaCache cache(sys);
  Lang q = lConcat({lit({"0"}), lNonterm("B")});
  const Nfa& first = cache.raw(q);
  const Nfa& second = cache.raw(q);
  CHECK(&first == &second);
  CHECK(nfaAccepts(first, rp("011")));
  CHECK(nfaAccepts(cache.simplified(q), rp("01")));
  CHECK(nfaAccepts(cache.closure(q), rp("011")));
}
