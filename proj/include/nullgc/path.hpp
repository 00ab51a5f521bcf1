#pragma once

#include <cstdint>
#include <iosfwd>
#include <set>
#include <string>
#include <vector>

namespace nullgc {

// Access-path symbols: 0/1 select the car/cdr field walking forward into the
// heap, 0~/1~ are their barred counterparts (a step remembered in reverse).
enum class Sym : uint8_t { Car = 0, Cdr = 1, CarB = 2, CdrB = 3 };

constexpr bool isForward(Sym s) { return s == Sym::Car || s == Sym::Cdr; }
constexpr bool isBarred(Sym s) { return !isForward(s); }
constexpr Sym bar(Sym s) { return static_cast<Sym>(static_cast<uint8_t>(s) ^ 2); }

enum class Shape { Forward, Backward, Bipath, Bottom };

// A word over the four selectors, or the absorbing error path bottom.
struct Path {
  std::vector<Sym> syms;
  bool bottom = false;

  Path() = default;
  explicit Path(std::vector<Sym> s) : syms(std::move(s)) {}

  static Path bot() {
    Path p;
    p.bottom = true;
    return p;
  }
  static Path eps() { return Path{}; }

  bool isBottom() const { return bottom; }
  bool isEps() const { return !bottom && syms.empty(); }
  size_t size() const { return syms.size(); }

  bool operator==(const Path& o) const {
    return bottom == o.bottom && (bottom || syms == o.syms);
  }
  bool operator!=(const Path& o) const { return !(*this == o); }
  // Shortlex (length first, then symbol order 0 < 1 < 0~ < 1~); bottom last.
  bool operator<(const Path& o) const;
};

// Cancels barred/forward selector pairs (0~0 and 1~1 vanish, 0~1 and 1~0
// collapse everything to bottom) until none remain. The rewrite system is
// confluent, so one left-to-right stack scan reaches the normal form.
Path reduce(const Path& p);

// Reverses the symbol order and toggles every bar. Throws on bottom.
Path reverse(const Path& p);

// Plain concatenation, not reduced; bottom absorbs.
Path concat(const Path& a, const Path& b);

// reduce(concat(a, b)).
Path concatReduce(const Path& a, const Path& b);

// True iff no barred selector is immediately followed by a forward one.
// Canonical non-bottom paths have the bipath shape: forward* then barred*.
bool isCanonical(const Path& p);

// Shape of a canonical path; asserts canonicity.
Shape classify(const Path& p);

// Text form: "e" for the empty path, "_|_" for bottom, otherwise 0/1 digits
// each optionally barred by a trailing '~', e.g. "10~1~".
std::string show(Sym s);
std::string show(const Path& p);
std::ostream& operator<<(std::ostream& os, const Path& p);

// Inverse of show; throws std::invalid_argument on malformed input.
Path parsePath(const std::string& text);

// Path sets are kept canonical: members reduced, bottom dropped, shortlex order.
using PathSet = std::set<Path>;

PathSet canonicalize(const PathSet& s);
PathSet setUnion(const PathSet& a, const PathSet& b);
PathSet setConcat(const PathSet& a, const PathSet& b);
PathSet setReverse(const PathSet& s);
std::string show(const PathSet& s);

}  // namespace nullgc
