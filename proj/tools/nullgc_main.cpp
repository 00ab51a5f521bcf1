#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "nullgc/gen.hpp"
#include "nullgc/report.hpp"

using namespace nullgc;

namespace {

// Problems with how the tool was invoked (as opposed to problems with the
// input program) exit with code 2.
struct Usage {
  std::string msg;
};

std::string readFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void writeFile(const std::string& path, const std::string& content) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

void writeDot(const std::string& dir, const std::string& name,
              const std::string& content) {
  std::filesystem::create_directories(dir);
  writeFile((std::filesystem::path(dir) / name).string(), content);
}

// Points are addressed by their stable preorder index; `pa` and `pb` name the
// innermost let of the program body and that let's body expression.
ProgramPoint resolvePoint(const Program& p, const std::string& arg) {
  if (arg == "pa" || arg == "pb") {
    const Expr* lastLet = nullptr;
    for (const Expr* e = &p.body; e->kind == ExprKind::Let; e = &e->kids[1])
      lastLet = e;
    if (!lastLet)
      throw std::runtime_error("the program body has no let chain, so " +
                               arg + " names no point");
    return arg == "pa" ? lastLet->point : lastLet->kids[1].point;
  }
  if (arg.empty() || arg.find_first_not_of("0123456789") != std::string::npos)
    throw Usage{"--point wants a number, pa, or pb (got '" + arg + "')"};
  int pt = std::stoi(arg);
  if (pt >= p.pointCount)
    throw std::runtime_error("point " + arg + " is out of range (program has " +
                             std::to_string(p.pointCount) + " points)");
  return pt;
}

const char* kindWord(ExprKind k) {
  switch (k) {
    case ExprKind::Const: return "const";
    case ExprKind::Var: return "var";
    case ExprKind::Nil: return "nil";
    case ExprKind::Cons: return "cons";
    case ExprKind::Car: return "car";
    case ExprKind::Cdr: return "cdr";
    case ExprKind::PairQ: return "pair?";
    case ExprKind::NullQ: return "null?";
    case ExprKind::Prim: return "prim";
    case ExprKind::If: return "if";
    case ExprKind::Let: return "let";
    case ExprKind::Call: return "call";
    case ExprKind::SetRoot: return "set!";
    case ExprKind::SetCar: return "set-car!";
    case ExprKind::SetCdr: return "set-cdr!";
    case ExprKind::Begin: return "begin";
  }
  return "?";
}

void dumpExpr(std::ostream& os, const Expr& e, int indent) {
  os << std::string(indent, ' ') << "#" << e.point << " " << kindWord(e.kind);
  if (e.kind == ExprKind::Const)
    os << " " << (e.isBool ? (e.num ? "#t" : "#f") : std::to_string(e.num));
  if (!e.name.empty()) os << " " << e.name;
  os << "\n";
  for (const Expr& k : e.kids) dumpExpr(os, k, indent + 2);
}

std::string dumpAst(const Program& p) {
  std::ostringstream os;
  for (const FunctionDef& d : p.defs) {
    os << "def " << d.name << "(";
    for (size_t i = 0; i < d.params.size(); ++i)
      os << (i ? " " : "") << d.params[i];
    os << ")\n";
    dumpExpr(os, d.body, 2);
  }
  os << "body\n";
  dumpExpr(os, p.body, 2);
  return os.str();
}

std::string joinWords(const std::vector<std::string>& words) {
  std::string out;
  for (const std::string& w : words) {
    if (!out.empty()) out += " ";
    out += w;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"liveness-driven heap-link nullification toolkit"};
  app.require_subcommand(1);

  std::string file, dotDir, jsonFile, pointArg, varName;
  int words = 4;
  int seeds = -1;

  CLI::App* cmdParse = app.add_subcommand("parse", "print the pointed AST");
  cmdParse->add_option("file", file, "program file")
      ->required()
      ->check(CLI::ExistingFile);

  CLI::App* cmdAnalyze = app.add_subcommand(
      "analyze", "run the analyses; print a digest or one live language");
  cmdAnalyze->add_option("file", file)->required()->check(CLI::ExistingFile);
  cmdAnalyze->add_option("--point", pointArg, "point index, pa, or pb");
  cmdAnalyze->add_option("--var", varName, "variable to query");
  cmdAnalyze->add_option("--words", words, "max word length to enumerate");
  cmdAnalyze->add_option("--json", jsonFile, "also write the digest here");
  cmdAnalyze->add_option("--dot", dotDir, "write live automata as DOT here");

  CLI::App* cmdTransform =
      app.add_subcommand("transform", "print the nullified program");
  cmdTransform->add_option("file", file)->required()->check(CLI::ExistingFile);
  cmdTransform->add_option("--json", jsonFile, "also write the plan here");

  CLI::App* cmdRun = app.add_subcommand("run", "evaluate and print the value");
  cmdRun->add_option("file", file)->required()->check(CLI::ExistingFile);

  CLI::App* cmdTrace =
      app.add_subcommand("trace", "evaluate and print the dereference trace");
  cmdTrace->add_option("file", file)->required()->check(CLI::ExistingFile);
  cmdTrace->add_option("--json", jsonFile, "write the trace here instead");
  cmdTrace->add_option("--dot", dotDir, "write a memory graph DOT here");
  cmdTrace->add_option("--point", pointArg, "point for the memory graph");

  CLI::App* cmdCheck = app.add_subcommand(
      "check", "dynamic soundness oracles over a file or generated corpus");
  cmdCheck->add_option("file", file)->check(CLI::ExistingFile);
  cmdCheck->add_option("--seeds", seeds, "check generated seeds 0..N-1");

  CLI::App* cmdReport = app.add_subcommand(
      "report", "reachable-cell comparison against the transformed program");
  cmdReport->add_option("file", file)->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*cmdParse) {
      std::cout << dumpAst(parse(readFile(file)));
      return 0;
    }

    if (*cmdAnalyze) {
      ScopedProgram sp = resolveScopes(parse(readFile(file)));
      AnalysisBundle b = analyzeAll(sp);
      if (pointArg.empty() != varName.empty())
        throw Usage{"--point and --var go together"};
      if (!pointArg.empty()) {
        ProgramPoint pt = resolvePoint(sp.program, pointArg);
        std::cout << "#" << pt << " " << pointSnippet(sp.program, pt) << "\n";
        std::cout << joinWords(liveWords(b, pt, varName, words)) << "\n";
        if (!dotDir.empty())
          writeDot(dotDir,
                   "live_p" + std::to_string(pt) + "_" + varName + ".dot",
                   nfaDot(liveMachine(b, pt, varName),
                          "live_p" + std::to_string(pt) + "_" + varName));
      } else {
        nlohmann::ordered_json doc = buildReport(b, words);
        std::cout << doc.dump(2) << "\n";
        if (!dotDir.empty())
          for (ProgramPoint pt = 0; pt < sp.program.pointCount; ++pt)
            for (const auto& [var, lang] : b.live.liveAt[pt])
              writeDot(dotDir,
                       "live_p" + std::to_string(pt) + "_" + var + ".dot",
                       nfaDot(liveMachine(b, pt, var),
                              "live_p" + std::to_string(pt) + "_" + var));
      }
      if (!jsonFile.empty())
        writeFile(jsonFile, buildReport(b, words).dump(2) + "\n");
      return 0;
    }

    if (*cmdTransform) {
      ScopedProgram sp = resolveScopes(parse(readFile(file)));
      AnalysisBundle b = analyzeAll(sp);
      Plan plan = planNullifications(b);
      TransformResult tr = applyPlan(sp, plan);
      std::cout << render(tr.program) << "\n";
      if (!jsonFile.empty()) {
        nlohmann::ordered_json doc;
        doc["schema"] = "nullgc/1";
        nlohmann::ordered_json stmts = nlohmann::ordered_json::array();
        for (const auto& [pt, list] : plan.at)
          for (const NullStmt& s : list)
            stmts.push_back(
                {{"point", pt}, {"var", s.var}, {"path", show(s.path)}});
        doc["plan"] = std::move(stmts);
        writeFile(jsonFile, doc.dump(2) + "\n");
      }
      return 0;
    }

    if (*cmdRun) {
      RunResult r = evalProgram(resolveScopes(parse(readFile(file))));
      if (!r.ok) {
        std::cerr << "error: point " << r.error.point << ": "
                  << r.error.message << "\n";
        return 1;
      }
      std::cout << show(r.value) << "\n";
      return 0;
    }

    if (*cmdTrace) {
      ScopedProgram sp = resolveScopes(parse(readFile(file)));
      RunResult r = evalProgram(sp);
      std::string doc = traceJson(r).dump(2) + "\n";
      if (!jsonFile.empty())
        writeFile(jsonFile, doc);
      else
        std::cout << doc;
      if (!dotDir.empty()) {
        if (pointArg.empty())
          throw Usage{"trace --dot needs --point to pick the snapshot"};
        ProgramPoint pt = resolvePoint(sp.program, pointArg);
        writeDot(dotDir, "memory_p" + std::to_string(pt) + ".dot",
                 dotMemoryGraph(r, pt));
      }
      if (!r.ok) {
        std::cerr << "error: point " << r.error.point << ": "
                  << r.error.message << "\n";
        return 1;
      }
      return 0;
    }

    if (*cmdCheck) {
      if (file.empty() && seeds < 0)
        throw Usage{"check wants a file, --seeds N, or both"};
      int bad = 0;
      auto one = [&bad](const std::string& label, const ScopedProgram& sp) {
        SoundnessOutcome out = checkProgram(sp);
        std::cout << label << ": " << (out.ok ? "ok" : "VIOLATION") << " ("
                  << out.totalChecks << " checks)\n";
        for (const std::string& v : out.violations)
          std::cout << "  " << v << "\n";
        if (!out.ok) ++bad;
      };
      if (!file.empty()) one(file, resolveScopes(parse(readFile(file))));
      for (int s = 0; s < seeds; ++s)
        one("seed " + std::to_string(s), resolveScopes(genProgram(s)));
      return bad ? 1 : 0;
    }

    if (*cmdReport) {
      ScopedProgram sp = resolveScopes(parse(readFile(file)));
      AnalysisBundle b = analyzeAll(sp);
      TransformResult tr = applyPlan(sp, planNullifications(b));
      RunResult p = evalProgram(sp);
      RunResult q = evalProgram(resolveScopes(tr.program), tr.firstFresh,
                                tr.attribution);
      if (!p.ok || !q.ok) {
        std::cerr << "error: the program does not run to completion\n";
        return 1;
      }
      std::cout << reachTable(reachStats(p, q, sp.program.pointCount));
      return 0;
    }
  } catch (const Usage& u) {
    std::cerr << "usage error: " << u.msg << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
