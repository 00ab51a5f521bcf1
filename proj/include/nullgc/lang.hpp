#pragma once

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "nullgc/path.hpp"

namespace nullgc {

// Symbolic language expressions. The analyses build these instead of concrete
// path sets: recursion shows up as named nonterminals, and the demand
// parameter of a function summary as the distinguished placeholder Var.
enum class LangKind { Empty, Lit, Var, Nonterm, Union, Concat, Reverse, Apply };

struct LangNode;
using Lang = std::shared_ptr<const LangNode>;

struct LangNode {
  LangKind kind = LangKind::Empty;
  PathSet lit;             // Lit: a finite, canonical path set
  std::string name;        // Nonterm: rule name; Apply: function name
  int index = 0;           // Apply: 1-based parameter position
  std::vector<Lang> kids;  // Union/Concat: factors; Reverse/Apply: one child
};

struct LangError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Lang lEmpty();
Lang lEps();
Lang lLit(PathSet s);
Lang lVar();
Lang lNonterm(std::string name);
// Smart constructors: unions drop empties and flatten, concatenations flatten,
// fold adjacent literals and drop {e} units, and an empty factor annihilates.
Lang lUnion(std::vector<Lang> xs);
Lang lConcat(std::vector<Lang> xs);
Lang lReverse(Lang x);
Lang lApply(std::string fn, int index, Lang arg);

bool structurallyEqual(const Lang& a, const Lang& b);
bool containsVar(const Lang& l);
// Replaces every Var placeholder by `repl`, sharing unchanged subtrees.
Lang substVar(const Lang& l, const Lang& repl);
// Rewrites Apply(f, i, arg) into U@f/i | D@f/i · arg, recursively.
Lang expandApplies(const Lang& l);

// Rule names used by the demand decomposition.
std::string uName(const std::string& fn, int index);
std::string dName(const std::string& fn, int index);

// Splits l into (u, d) with l == u | d·Var where neither part mentions Var.
// Fails if Var occurs anywhere but the trailing factor of a concatenation or
// under a Reverse.
struct Decomposed {
  Lang u, d;
};
Decomposed decompose(const Lang& l);

std::string show(const Lang& l);

// A set of named rules; language semantics are the least solution.
struct LangSystem {
  std::map<std::string, Lang> rules;
};

// Rendered alternatives of a rule body (unions split, each branch shown),
// sorted; the shape tests compare these against expected productions.
std::vector<std::string> ruleAlternatives(const LangSystem& sys,
                                          const std::string& name);

}  // namespace nullgc
