#include "nullgc/path.hpp"

#include <cassert>
#include <sstream>
#include <stdexcept>

namespace nullgc {

bool Path::operator<(const Path& o) const {
  if (bottom != o.bottom) return !bottom;
  if (bottom) return false;
  if (syms.size() != o.syms.size()) return syms.size() < o.syms.size();
  return syms < o.syms;
}

Path reduce(const Path& p) {
  if (p.bottom) return Path::bot();
  std::vector<Sym> stack;
  stack.reserve(p.syms.size());
  for (Sym s : p.syms) {
    if (isForward(s) && !stack.empty() && isBarred(stack.back())) {
      if (stack.back() == bar(s)) {
        stack.pop_back();
        continue;
      }
      return Path::bot();  // mismatched pair, e.g. 0~1
    }
    stack.push_back(s);
  }
  return Path(std::move(stack));
}

Path reverse(const Path& p) {
  if (p.bottom) throw std::invalid_argument("reverse of bottom path");
  Path r;
  r.syms.reserve(p.syms.size());
  for (auto it = p.syms.rbegin(); it != p.syms.rend(); ++it)
    r.syms.push_back(bar(*it));
  return r;
}

Path concat(const Path& a, const Path& b) {
  if (a.bottom || b.bottom) return Path::bot();
  Path r = a;
  r.syms.insert(r.syms.end(), b.syms.begin(), b.syms.end());
  return r;
}

Path concatReduce(const Path& a, const Path& b) { return reduce(concat(a, b)); }

bool isCanonical(const Path& p) {
  if (p.bottom) return true;
  for (size_t i = 1; i < p.syms.size(); ++i)
    if (isBarred(p.syms[i - 1]) && isForward(p.syms[i])) return false;
  return true;
}

Shape classify(const Path& p) {
  if (p.bottom) return Shape::Bottom;
  assert(isCanonical(p));
  bool anyFwd = false, anyBwd = false;
  for (Sym s : p.syms) (isForward(s) ? anyFwd : anyBwd) = true;
  if (!anyBwd) return Shape::Forward;  // includes the empty path
  if (!anyFwd) return Shape::Backward;
  return Shape::Bipath;
}

std::string show(Sym s) {
  switch (s) {
    case Sym::Car: return "0";
    case Sym::Cdr: return "1";
    case Sym::CarB: return "0~";
    case Sym::CdrB: return "1~";
  }
  return "?";
}

std::string show(const Path& p) {
  if (p.bottom) return "_|_";
  if (p.syms.empty()) return "e";
  std::string out;
  for (Sym s : p.syms) out += show(s);
  return out;
}

Path parsePath(const std::string& text) {
  size_t b = text.find_first_not_of(" \t");
  size_t e = text.find_last_not_of(" \t");
  if (b == std::string::npos) return Path::eps();
  std::string t = text.substr(b, e - b + 1);
  if (t == "e") return Path::eps();
  if (t == "_|_") return Path::bot();
  Path p;
  for (size_t i = 0; i < t.size(); ++i) {
    Sym s;
    if (t[i] == '0')
      s = Sym::Car;
    else if (t[i] == '1')
      s = Sym::Cdr;
    else
      throw std::invalid_argument("bad path symbol in \"" + t + "\"");
    if (i + 1 < t.size() && t[i + 1] == '~') {
      s = bar(s);
      ++i;
    }
    p.syms.push_back(s);
  }
  return p;
}

PathSet canonicalize(const PathSet& s) {
  PathSet out;
  for (const Path& p : s) {
    Path r = reduce(p);
    if (!r.bottom) out.insert(std::move(r));
  }
  return out;
}

PathSet setUnion(const PathSet& a, const PathSet& b) {
  PathSet out = a;
  out.insert(b.begin(), b.end());
  return out;
}

PathSet setConcat(const PathSet& a, const PathSet& b) {
  PathSet out;
  for (const Path& x : a)
    for (const Path& y : b) {
      Path r = concatReduce(x, y);
      if (!r.bottom) out.insert(std::move(r));
    }
  return out;
}

PathSet setReverse(const PathSet& s) {
  PathSet out;
  for (const Path& p : s) out.insert(reverse(p));
  return out;
}

std::ostream& operator<<(std::ostream& os, const Path& p) { return os << show(p); }

std::string show(const PathSet& s) {
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (const Path& p : s) {
    if (!first) os << ", ";
    first = false;
    os << show(p);
  }
  os << '}';
  return os.str();
}

}  // namespace nullgc
