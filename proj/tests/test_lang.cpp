#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nullgc/lang.hpp"

using namespace nullgc;

namespace {

PathSet ps(std::initializer_list<const char*> words) {
  PathSet s;
  for (const char* w : words) s.insert(parsePath(w));
  return s;
}

Lang lit(std::initializer_list<const char*> words) { return lLit(ps(words)); }

}  // namespace

TEST_CASE("union constructor flattens, dedups, and drops empties") {
  Lang a = lNonterm("A");
  Lang b = lNonterm("B");
  CHECK(structurallyEqual(lUnion({lEmpty(), a}), a));
  CHECK(structurallyEqual(lUnion({}), lEmpty()));
  CHECK(structurallyEqual(lUnion({lEmpty(), lEmpty()}), lEmpty()));

  Lang nested = lUnion({a, lUnion({b, a})});
  REQUIRE(nested->kind == LangKind::Union);
  CHECK(nested->kids.size() == 2);
  CHECK(structurallyEqual(nested->kids[0], a));
  CHECK(structurallyEqual(nested->kids[1], b));
}

TEST_CASE("concat constructor folds literals and respects units") {
  Lang a = lNonterm("A");
  CHECK(structurallyEqual(lConcat({lEmpty(), a}), lEmpty()));
  CHECK(structurallyEqual(lConcat({a, lEmpty()}), lEmpty()));
  CHECK(structurallyEqual(lConcat({}), lEps()));
  CHECK(structurallyEqual(lConcat({lEps(), a, lEps()}), a));

  // Adjacent literal factors fold with reduction: 0 then 0~ keeps the pair,
  // 0~ then 1 collapses to bottom and the word disappears.
  CHECK(structurallyEqual(lConcat({lit({"0"}), lit({"0~"})}), lit({"00~"})));
  CHECK(structurallyEqual(lConcat({lit({"0~"}), lit({"1"})}), lEmpty()));
  CHECK(structurallyEqual(lConcat({lit({"0~"}), lit({"0"})}), lEps()));
  CHECK(structurallyEqual(lConcat({lit({"0", "1"}), lit({"e", "0"})}),
                          lit({"0", "1", "00", "10"})));

  // Nested concatenations flatten.
  Lang c = lConcat({lConcat({lit({"0"}), a}), lit({"1"})});
  REQUIRE(c->kind == LangKind::Concat);
  CHECK(c->kids.size() == 3);
}

TEST_CASE("reverse constructor evaluates literals and cancels itself") {
  CHECK(structurallyEqual(lReverse(lit({"01"})), lit({"1~0~"})));
  CHECK(structurallyEqual(lReverse(lEmpty()), lEmpty()));
  Lang a = lNonterm("A");
  CHECK(structurallyEqual(lReverse(lReverse(a)), a));
  Lang r = lReverse(a);
  REQUIRE(r->kind == LangKind::Reverse);
  CHECK(structurallyEqual(r->kids[0], a));
}

TEST_CASE("substVar replaces every placeholder") {
  Lang body = lUnion({lit({"e"}), lConcat({lit({"0"}), lVar()})});
  CHECK(containsVar(body));
  CHECK(!containsVar(lit({"0"})));

  Lang closed = substVar(body, lit({"1"}));
  CHECK(!containsVar(closed));
  CHECK(structurallyEqual(closed, lit({"e", "01"})));

  Lang keep = substVar(body, lNonterm("X"));
  CHECK(structurallyEqual(
      keep, lUnion({lit({"e"}), lConcat({lit({"0"}), lNonterm("X")})})));

  // Sharing: a var-free tree is returned unchanged, same node.
  Lang noVar = lConcat({lit({"0"}), lNonterm("A")});
  CHECK(substVar(noVar, lit({"1"})).get() == noVar.get());
}

TEST_CASE("apply expansion rewrites into summary nonterminals") {
  CHECK(uName("f", 1) == "U@f/1");
  CHECK(dName("append", 2) == "D@append/2");

  Lang app = lApply("f", 1, lVar());
  Lang ex = expandApplies(app);
  CHECK(structurallyEqual(
      ex, lUnion({lNonterm("U@f/1"),
                  lConcat({lNonterm("D@f/1"), lVar()})})));

  // Nested applies expand on the way down.
  Lang nested = lApply("g", 2, lApply("f", 1, lit({"e"})));
  Lang exNested = expandApplies(nested);
  CHECK(!containsVar(exNested));
  CHECK(structurallyEqual(
      exNested,
      lUnion({lNonterm("U@g/2"),
              lConcat({lNonterm("D@g/2"),
                       lUnion({lNonterm("U@f/1"), lNonterm("D@f/1")})})})));
}

TEST_CASE("decompose splits a demand into closed and propagated parts") {
  SUBCASE("bare placeholder") {
    Decomposed d = decompose(lVar());
    CHECK(structurallyEqual(d.u, lEmpty()));
    CHECK(structurallyEqual(d.d, lEps()));
  }
  SUBCASE("no placeholder at all") {
    Lang l = lUnion({lit({"e"}), lNonterm("A")});
    Decomposed d = decompose(l);
    CHECK(structurallyEqual(d.u, l));
    CHECK(structurallyEqual(d.d, lEmpty()));
  }
  SUBCASE("union and trailing concatenation") {
    Lang l = lUnion({lit({"e"}), lConcat({lit({"0"}), lVar()})});
    Decomposed d = decompose(l);
    CHECK(structurallyEqual(d.u, lit({"e"})));
    CHECK(structurallyEqual(d.d, lit({"0"})));
  }
  SUBCASE("apply folds through summaries") {
    Decomposed d = decompose(lApply("f", 2, lVar()));
    CHECK(structurallyEqual(d.u, lNonterm("U@f/2")));
    CHECK(structurallyEqual(d.d, lNonterm("D@f/2")));

    Lang arg = lUnion({lit({"e"}), lConcat({lit({"0"}), lVar()})});
    Decomposed d2 = decompose(lApply("f", 1, arg));
    CHECK(structurallyEqual(
        d2.u, lUnion({lNonterm("U@f/1"),
                      lConcat({lNonterm("D@f/1"), lit({"e"})})})));
    CHECK(structurallyEqual(d2.d,
                            lConcat({lNonterm("D@f/1"), lit({"0"})})));
  }
  SUBCASE("placeholder in a non-trailing factor is rejected") {
    Lang bad = lConcat({lVar(), lit({"0"})});
    CHECK_THROWS_AS(decompose(bad), LangError);
  }
  SUBCASE("placeholder under a reversal is rejected") {
    CHECK_THROWS_AS(decompose(lReverse(lVar())), LangError);
  }
}

TEST_CASE("rendering is stable") {
  CHECK(show(lEmpty()) == "{}");
  CHECK(show(lEps()) == "{e}");
  CHECK(show(lVar()) == "sigma");
  CHECK(show(lit({"0", "10~"})) == "{0, 10~}");
  CHECK(show(lNonterm("U@f/1")) == "U@f/1");
  CHECK(show(lReverse(lNonterm("A"))) == "rev(A)");
  CHECK(show(lApply("f", 1, lVar())) == "LF@f/1(sigma)");
  CHECK(show(lUnion({lit({"e"}), lConcat({lit({"0"}), lNonterm("X")})})) ==
        "{e} | {0}\xC2\xB7X");
  // Literal members of a union merge into one set.
  CHECK(structurallyEqual(lUnion({lit({"0"}), lit({"1"})}), lit({"0", "1"})));
  CHECK(show(lConcat({lUnion({lNonterm("A"), lit({"1"})}), lNonterm("X")})) ==
        "(A | {1})\xC2\xB7X");
}

TEST_CASE("rule alternatives are split and sorted") {
  LangSystem sys;
  sys.rules["A"] =
      lUnion({lConcat({lit({"1"}), lNonterm("A")}), lit({"e"})});
  sys.rules["B"] = lit({"0"});
  CHECK(ruleAlternatives(sys, "A") ==
        std::vector<std::string>{"{1}\xC2\xB7" "A", "{e}"});
  CHECK(ruleAlternatives(sys, "B") == std::vector<std::string>{"{0}"});
  CHECK(ruleAlternatives(sys, "missing").empty());
}
