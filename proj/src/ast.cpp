#include "nullgc/ast.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>

namespace nullgc {

namespace {

std::string lowered(const std::string& s) {
  std::string out = s;
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

const std::set<std::string>& keywords() {
  static const std::set<std::string> kw = {
      "define", "cons",     "car",      "cdr",   "pair?", "null?",
      "prim",   "if",       "let",      "in",    "nil",   "set!",
      "set-car!", "set-cdr!", "begin"};
  return kw;
}

bool isArrow(const std::string& s) { return s == "<-" || s == "\xE2\x86\x90"; }

struct Token {
  enum Kind { LParen, RParen, Atom, End } kind;
  std::string text;
  int line, col;
};

std::vector<Token> tokenize(const std::string& src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  size_t i = 0;
  auto advance = [&](char c) {
    if (c == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == ';') {
      while (i < src.size() && src[i] != '\n') advance(src[i++]);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(c);
      ++i;
      continue;
    }
    if (c == '(' || c == ')') {
      out.push_back({c == '(' ? Token::LParen : Token::RParen,
                     std::string(1, c), line, col});
      advance(c);
      ++i;
      continue;
    }
    int tl = line, tc = col;
    std::string atom;
    while (i < src.size()) {
      char a = src[i];
      if (std::isspace(static_cast<unsigned char>(a)) || a == '(' ||
          a == ')' || a == ';')
        break;
      atom.push_back(a);
      advance(a);
      ++i;
    }
    out.push_back({Token::Atom, atom, tl, tc});
  }
  out.push_back({Token::End, "", line, col});
  return out;
}

bool parseInt(const std::string& s, long long& out) {
  if (s.empty()) return false;
  size_t start = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (start == s.size()) return false;
  for (size_t i = start; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  out = std::strtoll(s.c_str(), nullptr, 10);
  return true;
}

bool validIdentifier(const std::string& s) {
  if (s.empty()) return false;
  if (keywords().count(lowered(s))) return false;
  if (isArrow(s)) return false;
  if (std::isdigit(static_cast<unsigned char>(s[0])) || s[0] == '#')
    return false;
  for (char c : s) {
    if (std::isalnum(static_cast<unsigned char>(c))) continue;
    if (std::string("_+-*/<>=!?").find(c) != std::string::npos) continue;
    return false;
  }
  return true;
}

class Parser {
 public:
  explicit Parser(const std::string& src) : toks_(tokenize(src)) {}

  Program program() {
    Program p;
    bool haveBody = false;
    while (peek().kind != Token::End) {
      if (startsDefine()) {
        if (haveBody)
          fail("function definitions must precede the program expression",
               peek());
        p.defs.push_back(define());
      } else {
        if (haveBody)
          fail("expected a single program expression", peek());
        p.body = expr();
        haveBody = true;
      }
    }
    if (!haveBody) fail("expected a program expression", peek());
    int next = 0;
    for (auto& d : p.defs) number(d.body, next);
    number(p.body, next);
    p.pointCount = next;
    return p;
  }

 private:
  std::vector<Token> toks_;
  size_t pos_ = 0;

  const Token& peek(size_t ahead = 0) const {
    size_t i = pos_ + ahead;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  const Token& take() {
    const Token& t = peek();
    if (t.kind != Token::End) ++pos_;
    return t;
  }
  [[noreturn]] static void fail(const std::string& msg, const Token& t) {
    throw ParseError(msg, t.line, t.col);
  }

  bool startsDefine() const {
    return peek().kind == Token::LParen && peek(1).kind == Token::Atom &&
           lowered(peek(1).text) == "define";
  }

  void expectR(const Token& open, const char* form) {
    if (peek().kind != Token::RParen)
      fail(std::string("expected ')' to close ") + form +
               " opened at " + std::to_string(open.line) + ":" +
               std::to_string(open.col),
           peek());
    take();
  }

  std::string identifier(const char* what) {
    const Token& t = take();
    if (t.kind != Token::Atom || !validIdentifier(t.text))
      fail(std::string("expected ") + what, t);
    return t.text;
  }

  FunctionDef define() {
    const Token& open = take();  // (
    take();                      // define
    FunctionDef d;
    const Token& hdr = take();
    if (hdr.kind != Token::LParen)
      fail("expected (name params...) after define", hdr);
    d.name = identifier("function name");
    while (peek().kind == Token::Atom)
      d.params.push_back(identifier("parameter name"));
    if (peek().kind != Token::RParen)
      fail("expected ')' after parameter list", peek());
    take();
    d.body = expr();
    expectR(open, "define");
    return d;
  }

  Expr literalNil(const char* form) {
    const Token& t = take();
    if (t.kind != Token::Atom || lowered(t.text) != "nil")
      fail(std::string(form) + " stores nil only", t);
    Expr e;
    e.kind = ExprKind::Nil;
    return e;
  }

  std::vector<Expr> args(const Token& open, const char* form, size_t n) {
    std::vector<Expr> out;
    while (peek().kind != Token::RParen && peek().kind != Token::End)
      out.push_back(expr());
    if (out.size() != n)
      fail(std::string(form) + " expects " + std::to_string(n) +
               " argument" + (n == 1 ? "" : "s") + ", got " +
               std::to_string(out.size()),
           open);
    expectR(open, form);
    return out;
  }

  Expr expr() {
    const Token& t = take();
    if (t.kind == Token::RParen) fail("unexpected ')'", t);
    if (t.kind == Token::End) fail("unexpected end of input", t);
    if (t.kind == Token::Atom) return atom(t);

    // t is '('.
    const Token& head = peek();
    if (head.kind == Token::RParen) fail("empty form", head);
    if (head.kind != Token::Atom) fail("expected a form name", head);
    std::string h = lowered(head.text);
    take();

    Expr e;
    if (h == "cons") {
      e.kind = ExprKind::Cons;
      e.kids = args(t, "cons", 2);
    } else if (h == "car") {
      e.kind = ExprKind::Car;
      e.kids = args(t, "car", 1);
    } else if (h == "cdr") {
      e.kind = ExprKind::Cdr;
      e.kids = args(t, "cdr", 1);
    } else if (h == "pair?") {
      e.kind = ExprKind::PairQ;
      e.kids = args(t, "pair?", 1);
    } else if (h == "null?") {
      e.kind = ExprKind::NullQ;
      e.kids = args(t, "null?", 1);
    } else if (h == "prim") {
      e.kind = ExprKind::Prim;
      e.kids = args(t, "prim", 2);
    } else if (h == "if") {
      e.kind = ExprKind::If;
      e.kids = args(t, "if", 3);
    } else if (h == "let") {
      e.kind = ExprKind::Let;
      e.name = identifier("a variable after let");
      const Token& arrow = take();
      if (arrow.kind != Token::Atom || !isArrow(arrow.text))
        fail("expected '<-' in let", arrow);
      e.kids.push_back(expr());
      const Token& kwIn = take();
      if (kwIn.kind != Token::Atom || lowered(kwIn.text) != "in")
        fail("expected 'in' in let", kwIn);
      e.kids.push_back(expr());
      expectR(t, "let");
    } else if (h == "set!") {
      e.kind = ExprKind::SetRoot;
      e.name = identifier("a variable after set!");
      literalNil("set!");
      expectR(t, "set!");
    } else if (h == "set-car!") {
      e.kind = ExprKind::SetCar;
      e.kids.push_back(expr());
      literalNil("set-car!");
      expectR(t, "set-car!");
    } else if (h == "set-cdr!") {
      e.kind = ExprKind::SetCdr;
      e.kids.push_back(expr());
      literalNil("set-cdr!");
      expectR(t, "set-cdr!");
    } else if (h == "begin") {
      e.kind = ExprKind::Begin;
      while (peek().kind != Token::RParen && peek().kind != Token::End)
        e.kids.push_back(expr());
      if (e.kids.empty()) fail("begin expects at least one expression", t);
      expectR(t, "begin");
    } else if (h == "define") {
      fail("define is only allowed at the top level", t);
    } else if (h == "in" || keywords().count(h)) {
      fail("misplaced keyword '" + head.text + "'", head);
    } else {
      if (!validIdentifier(head.text))
        fail("invalid function name '" + head.text + "'", head);
      e.kind = ExprKind::Call;
      e.name = head.text;
      while (peek().kind != Token::RParen && peek().kind != Token::End)
        e.kids.push_back(expr());
      expectR(t, "call");
    }
    return e;
  }

  Expr atom(const Token& t) {
    Expr e;
    long long v;
    std::string low = lowered(t.text);
    if (parseInt(t.text, v)) {
      e.kind = ExprKind::Const;
      e.num = v;
    } else if (low == "#t" || low == "#f") {
      e.kind = ExprKind::Const;
      e.isBool = true;
      e.num = (low == "#t") ? 1 : 0;
    } else if (low == "nil") {
      e.kind = ExprKind::Nil;
    } else if (validIdentifier(t.text)) {
      e.kind = ExprKind::Var;
      e.name = t.text;
    } else {
      fail("unexpected token '" + t.text + "'", t);
    }
    return e;
  }

  static void number(Expr& e, int& next) {
    e.point = next++;
    for (auto& k : e.kids) number(k, next);
  }
};

// ---------------------------------------------------------------------------
// Scope resolution.

class Scoper {
 public:
  ScopedProgram run(const Program& in) {
    ScopedProgram out;
    out.program = in;
    out.visible.assign(in.pointCount, {});
    for (const auto& d : in.defs) {
      if (!arity_.emplace(d.name, d.params.size()).second)
        throw ScopeError("duplicate function name '" + d.name + "'");
    }
    for (auto& d : out.program.defs) {
      std::map<std::string, std::string> env;
      std::vector<std::string> scope;
      for (auto& p : d.params) {
        if (env.count(p))
          throw ScopeError("duplicate parameter '" + p + "' in function '" +
                           d.name + "'");
        std::string u = unique(p);
        env[p] = u;
        scope.push_back(u);
        p = u;
      }
      resolve(d.body, env, scope, out);
    }
    std::map<std::string, std::string> env;
    std::vector<std::string> scope;
    resolve(out.program.body, env, scope, out);
    return out;
  }

 private:
  std::map<std::string, size_t> arity_;
  std::set<std::string> used_;

  std::string unique(const std::string& base) {
    std::string name = base;
    int n = 0;
    while (!used_.insert(name).second) name = base + "_" + std::to_string(++n);
    return name;
  }

  void resolve(Expr& e, std::map<std::string, std::string>& env,
               std::vector<std::string>& scope, ScopedProgram& out) {
    out.visible[e.point] = scope;
    switch (e.kind) {
      case ExprKind::Var:
      case ExprKind::SetRoot: {
        auto it = env.find(e.name);
        if (it == env.end())
          throw ScopeError("unbound variable '" + e.name + "'");
        e.name = it->second;
        break;
      }
      case ExprKind::Let: {
        resolve(e.kids[0], env, scope, out);
        std::string u = unique(e.name);
        auto prev = env.find(e.name);
        std::string saved;
        bool had = prev != env.end();
        if (had) saved = prev->second;
        env[e.name] = u;
        scope.push_back(u);
        std::string orig = e.name;
        e.name = u;
        resolve(e.kids[1], env, scope, out);
        scope.pop_back();
        if (had)
          env[orig] = saved;
        else
          env.erase(orig);
        break;
      }
      case ExprKind::Call: {
        auto it = arity_.find(e.name);
        if (it == arity_.end())
          throw ScopeError("call to undefined function '" + e.name + "'");
        if (it->second != e.kids.size())
          throw ScopeError("function '" + e.name + "' expects " +
                           std::to_string(it->second) + " argument" +
                           (it->second == 1 ? "" : "s") + ", got " +
                           std::to_string(e.kids.size()));
        for (auto& k : e.kids) resolve(k, env, scope, out);
        break;
      }
      default:
        for (auto& k : e.kids) resolve(k, env, scope, out);
        break;
    }
  }
};

// ---------------------------------------------------------------------------
// Rendering.

std::string inlineExpr(const Expr& e) {
  switch (e.kind) {
    case ExprKind::Const:
      return e.isBool ? (e.num ? "#t" : "#f") : std::to_string(e.num);
    case ExprKind::Var:
      return e.name;
    case ExprKind::Nil:
      return "nil";
    case ExprKind::Cons:
      return "(cons " + inlineExpr(e.kids[0]) + " " + inlineExpr(e.kids[1]) +
             ")";
    case ExprKind::Car:
      return "(car " + inlineExpr(e.kids[0]) + ")";
    case ExprKind::Cdr:
      return "(cdr " + inlineExpr(e.kids[0]) + ")";
    case ExprKind::PairQ:
      return "(pair? " + inlineExpr(e.kids[0]) + ")";
    case ExprKind::NullQ:
      return "(null? " + inlineExpr(e.kids[0]) + ")";
    case ExprKind::Prim:
      return "(prim " + inlineExpr(e.kids[0]) + " " + inlineExpr(e.kids[1]) +
             ")";
    case ExprKind::If:
      return "(if " + inlineExpr(e.kids[0]) + " " + inlineExpr(e.kids[1]) +
             " " + inlineExpr(e.kids[2]) + ")";
    case ExprKind::Let:
      return "(let " + e.name + " <- " + inlineExpr(e.kids[0]) + " in " +
             inlineExpr(e.kids[1]) + ")";
    case ExprKind::SetRoot:
      return "(set! " + e.name + " nil)";
    case ExprKind::SetCar:
      return "(set-car! " + inlineExpr(e.kids[0]) + " nil)";
    case ExprKind::SetCdr:
      return "(set-cdr! " + inlineExpr(e.kids[0]) + " nil)";
    case ExprKind::Begin:
    case ExprKind::Call: {
      std::string out = "(";
      out += (e.kind == ExprKind::Begin) ? "begin" : e.name;
      for (const auto& k : e.kids) out += " " + inlineExpr(k);
      return out + ")";
    }
  }
  return "";
}

constexpr int kWidth = 72;

void pretty(const Expr& e, int indent, std::string& out) {
  std::string flat = inlineExpr(e);
  if (indent + static_cast<int>(flat.size()) <= kWidth) {
    out += flat;
    return;
  }
  std::string pad(indent + 2, ' ');
  auto breakInto = [&](const std::string& head,
                       const std::vector<const Expr*>& rest) {
    out += "(" + head;
    for (const Expr* k : rest) {
      out += "\n" + pad;
      pretty(*k, indent + 2, out);
    }
    out += ")";
  };
  switch (e.kind) {
    case ExprKind::Let: {
      out += "(let " + e.name + " <- ";
      pretty(e.kids[0], indent + 7 + static_cast<int>(e.name.size()), out);
      out += " in\n" + pad;
      pretty(e.kids[1], indent + 2, out);
      out += ")";
      return;
    }
    case ExprKind::If: {
      out += "(if ";
      pretty(e.kids[0], indent + 4, out);
      out += "\n" + pad;
      pretty(e.kids[1], indent + 2, out);
      out += "\n" + pad;
      pretty(e.kids[2], indent + 2, out);
      out += ")";
      return;
    }
    case ExprKind::Cons: {
      breakInto("cons", {&e.kids[0], &e.kids[1]});
      return;
    }
    case ExprKind::Prim: {
      breakInto("prim", {&e.kids[0], &e.kids[1]});
      return;
    }
    case ExprKind::Car:
    case ExprKind::Cdr:
    case ExprKind::PairQ:
    case ExprKind::NullQ:
    case ExprKind::SetCar:
    case ExprKind::SetCdr: {
      static const std::map<ExprKind, std::string> names = {
          {ExprKind::Car, "car"},         {ExprKind::Cdr, "cdr"},
          {ExprKind::PairQ, "pair?"},     {ExprKind::NullQ, "null?"},
          {ExprKind::SetCar, "set-car!"}, {ExprKind::SetCdr, "set-cdr!"}};
      out += "(" + names.at(e.kind) + " ";
      pretty(e.kids[0], indent + 2 + static_cast<int>(names.at(e.kind).size()),
             out);
      if (e.kind == ExprKind::SetCar || e.kind == ExprKind::SetCdr)
        out += " nil";
      out += ")";
      return;
    }
    case ExprKind::Begin:
    case ExprKind::Call: {
      std::vector<const Expr*> rest;
      for (const auto& k : e.kids) rest.push_back(&k);
      breakInto(e.kind == ExprKind::Begin ? "begin" : e.name, rest);
      return;
    }
    default:
      out += flat;
      return;
  }
}

}  // namespace

Program parse(const std::string& source) { return Parser(source).program(); }

ScopedProgram resolveScopes(const Program& p) { return Scoper().run(p); }

std::string render(const Program& p) {
  std::string out;
  for (const auto& d : p.defs) {
    out += "(define (" + d.name;
    for (const auto& v : d.params) out += " " + v;
    out += ")\n  ";
    pretty(d.body, 2, out);
    out += ")\n\n";
  }
  pretty(p.body, 0, out);
  out += "\n";
  return out;
}

std::vector<const Expr*> pointExprs(const Program& p) {
  std::vector<const Expr*> out(p.pointCount, nullptr);
  auto walk = [&](const Expr& e, auto&& self) -> void {
    if (e.point >= 0 && e.point < p.pointCount) out[e.point] = &e;
    for (const auto& k : e.kids) self(k, self);
  };
  for (const auto& d : p.defs) walk(d.body, walk);
  walk(p.body, walk);
  return out;
}

std::string pointSnippet(const Program& p, ProgramPoint pt) {
  auto exprs = pointExprs(p);
  if (pt < 0 || pt >= static_cast<int>(exprs.size()) || !exprs[pt]) return "?";
  std::string s = inlineExpr(*exprs[pt]);
  if (s.size() > 48) s = s.substr(0, 45) + "...";
  return s;
}

bool sameShape(const Expr& a, const Expr& b) {
  if (a.kind != b.kind || a.num != b.num || a.isBool != b.isBool ||
      a.name != b.name || a.kids.size() != b.kids.size())
    return false;
  for (size_t i = 0; i < a.kids.size(); ++i)
    if (!sameShape(a.kids[i], b.kids[i])) return false;
  return true;
}

bool sameShape(const Program& a, const Program& b) {
  if (a.defs.size() != b.defs.size()) return false;
  for (size_t i = 0; i < a.defs.size(); ++i) {
    if (a.defs[i].name != b.defs[i].name ||
        a.defs[i].params != b.defs[i].params ||
        !sameShape(a.defs[i].body, b.defs[i].body))
      return false;
  }
  return sameShape(a.body, b.body);
}

}  // namespace nullgc
