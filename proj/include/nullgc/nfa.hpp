#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "nullgc/path.hpp"

namespace nullgc {

// Index of the epsilon label in Nfa::next.
constexpr int kEps = 4;

// Nondeterministic finite automaton over the four path symbols (Sym values
// 0..3 index the transition table directly); slot 4 holds epsilon edges.
struct Nfa {
  int numStates = 0;
  int start = 0;
  std::vector<char> accept;
  std::vector<std::array<std::vector<int>, 5>> next;

  int addState();
  void addEdge(int from, int sym, int to);
  bool hasEdge(int from, int sym, int to) const;
};

Nfa nfaEmpty();
Nfa nfaEpsilon();
Nfa nfaWord(const Path& p);
// Finite set of paths; bottom entries are ignored.
Nfa nfaFromSet(const PathSet& s);

Nfa nfaUnion(const Nfa& a, const Nfa& b);
Nfa nfaConcat(const Nfa& a, const Nfa& b);
// Mirror image: reverses every word and toggles bars, so the result accepts
// exactly { reverse(w) : w in L(a) }.
Nfa nfaReverse(const Nfa& a);

bool nfaAccepts(const Nfa& a, const Path& p);
bool nfaIsEmpty(const Nfa& a);
bool nfaIntersectEmpty(const Nfa& a, const Nfa& b);
Nfa nfaIntersect(const Nfa& a, const Nfa& b);

// Accepts every word of Sym over {0,1} (used to close prefixes downward).
Nfa nfaForwardUniverse();
// Accepts forward* followed by barred*: the shape of every canonical path.
Nfa nfaCanonicalShape();
// Accepts the empty word and any word that mixes at least one forward with
// at least one barred selector; rejects nonempty single-polarity words.
Nfa nfaMixedOrEps();

// Removes epsilon edges without renumbering states; acceptance is promoted
// across epsilon closures.
Nfa nfaEpsFree(const Nfa& a);
// Drops states that are unreachable from the start or cannot reach an
// accepting state, renumbering the rest.
Nfa nfaTrim(const Nfa& a);

// All accepted words of length <= maxLen in shortlex order (0 < 1 < 0~ < 1~),
// stopping after `cap` words when cap > 0.
std::vector<Path> nfaEnumerate(const Nfa& a, int maxLen, size_t cap = 0);

// Rewrites an automaton for a set of possibly-unreduced words into one for
// the plain forward words among their reductions: saturate with epsilon edges
// across adjacent cancelling pairs (a barred edge followed by its unbarred
// partner), then drop barred edges and trim.
Nfa simplify(const Nfa& a);
// Same saturation, but barred edges are kept and nothing is trimmed: the
// result accepts every bottom-free reduced form of every accepted word (and
// the originals).
Nfa reductClosure(const Nfa& a);

std::string nfaDot(const Nfa& a, const std::string& name);
std::string nfaStats(const Nfa& a);

}  // namespace nullgc
