#pragma once

#include <map>
#include <string>

#include "nullgc/lang.hpp"
#include "nullgc/nfa.hpp"

namespace nullgc {

// Builds a finite automaton whose language contains the language of `root`
// under the rules of `sys` (least-solution semantics). Strongly connected
// rule groups that are purely right-linear or purely left-linear are
// translated exactly; other groups go through the standard regular
// over-approximation that splits every nonterminal A of the group into an
// entry A and a continuation A', turning the group right-linear. Var and
// Apply nodes must have been substituted/expanded away beforehand.
Nfa toNfa(const LangSystem& sys, const Lang& root);
Nfa toNfa(const LangSystem& sys, const std::string& nonterm);

// Caches automata per language node so repeated queries against the same
// analysis result stay cheap. Simplified/closed variants are cached too.
class NfaCache {
 public:
  explicit NfaCache(const LangSystem& sys) : sys_(sys) {}

  const Nfa& raw(const Lang& l);
  const Nfa& simplified(const Lang& l);
  const Nfa& closure(const Lang& l);
  const LangSystem& system() const { return sys_; }

 private:
  LangSystem sys_;
  std::map<const LangNode*, Nfa> raw_, simp_, clos_;
  std::map<const LangNode*, Lang> pinned_;
};

}  // namespace nullgc
