#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace nullgc {

// Expression forms of the input language plus the output-only mutation forms
// (SetRoot/SetCar/SetCdr/Begin) produced by the null-insertion transform.
enum class ExprKind {
  Const,
  Var,
  Nil,
  Cons,
  Car,
  Cdr,
  PairQ,
  NullQ,
  Prim,
  If,
  Let,
  Call,
  SetRoot,
  SetCar,
  SetCdr,
  Begin,
};

// A program point is the point just before an expression; points are dense
// preorder indices over the whole program (function bodies first, in order of
// definition, then the program expression).
using ProgramPoint = int;

struct Expr {
  ExprKind kind = ExprKind::Nil;
  ProgramPoint point = -1;

  long long num = 0;     // Const: integer value (or 0/1 when isBool)
  bool isBool = false;   // Const: true when the literal was #f/#t
  std::string name;      // Var, Let (bound variable), Call (callee), SetRoot

  // Children in source order. Cons/Prim: {e1,e2}; Car/Cdr/PairQ/NullQ: {e1};
  // If: {cond,then,else}; Let: {bound,body}; Call: args; SetCar/SetCdr:
  // {target} (the stored value is always NIL); Begin: statements + final expr.
  std::vector<Expr> kids;
};

struct FunctionDef {
  std::string name;
  std::vector<std::string> params;
  Expr body;
};

struct Program {
  std::vector<FunctionDef> defs;
  Expr body;
  int pointCount = 0;
};

// Thrown with a message that includes 1-based line/column information.
struct ParseError : std::runtime_error {
  int line, col;
  ParseError(const std::string& msg, int line_, int col_)
      : std::runtime_error("parse error at " + std::to_string(line_) + ":" +
                           std::to_string(col_) + ": " + msg),
        line(line_),
        col(col_) {}
};

struct ScopeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown by the static analyses when they meet a form outside the input
// language (the mutation forms exist only in transformed output).
struct AnalysisError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A program whose variables have been made globally unique (shadowing renamed
// with _1, _2, ... suffixes) together with the visible-variable sets per point.
struct ScopedProgram {
  Program program;
  // Indexed by program point: let-bound variables and parameters in scope,
  // outermost first.
  std::vector<std::vector<std::string>> visible;
};

Program parse(const std::string& source);
ScopedProgram resolveScopes(const Program& p);
std::string render(const Program& p);

// Pointers to the expression carrying each point, indexed by point.
std::vector<const Expr*> pointExprs(const Program& p);
// One-line rendering of the expression at a point, truncated for display.
std::string pointSnippet(const Program& p, ProgramPoint pt);

// Structural equality ignoring points (used by render/parse round-trip tests).
bool sameShape(const Expr& a, const Expr& b);
bool sameShape(const Program& a, const Program& b);

}  // namespace nullgc
