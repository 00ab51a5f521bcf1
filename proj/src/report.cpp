#include "nullgc/report.hpp"

#include <algorithm>
#include <sstream>

#include "nullgc/grammar.hpp"

namespace nullgc {

namespace {

constexpr size_t kWordCap = 512;

std::vector<std::string> renderWords(const std::vector<Path>& words) {
  std::vector<std::string> out;
  out.reserve(words.size());
  for (const Path& w : words) out.push_back(show(w));
  return out;
}

}  // namespace

std::vector<std::string> liveWords(AnalysisBundle& b, ProgramPoint pt,
                                   const std::string& var, int maxLen) {
  return renderWords(nfaEnumerate(liveMachine(b, pt, var), maxLen, kWordCap));
}

std::vector<std::string> langWords(const LangSystem& sys, const Lang& l,
                                   int maxLen) {
  return renderWords(nfaEnumerate(simplify(toNfa(sys, l)), maxLen, kWordCap));
}

nlohmann::ordered_json buildReport(AnalysisBundle& b, int maxLen) {
  nlohmann::ordered_json doc;
  doc["schema"] = "nullgc/1";
  doc["points"] = b.sp.program.pointCount;

  Plan plan = planNullifications(b);
  nlohmann::ordered_json planJson = nlohmann::ordered_json::array();
  int planStatements = 0;
  for (const auto& [pt, stmts] : plan.at)
    for (const NullStmt& s : stmts) {
      planJson.push_back({{"point", pt},
                          {"var", s.var},
                          {"path", show(s.path)}});
      ++planStatements;
    }
  doc["plan"] = std::move(planJson);

  nlohmann::ordered_json points = nlohmann::ordered_json::array();
  for (ProgramPoint pt = 0; pt < b.sp.program.pointCount; ++pt) {
    nlohmann::ordered_json entry;
    entry["point"] = pt;
    entry["snippet"] = pointSnippet(b.sp.program, pt);

    nlohmann::ordered_json live = nlohmann::ordered_json::object();
    for (const auto& [var, lang] : b.live.liveAt[pt])
      live[var] = liveWords(b, pt, var, maxLen);
    entry["live"] = std::move(live);

    nlohmann::ordered_json avail = nlohmann::ordered_json::object();
    for (const auto& [var, paths] : b.avail.availAt[pt]) {
      std::vector<std::string> words;
      for (const Path& p : paths) words.push_back(show(p));
      avail[var] = std::move(words);
    }
    entry["avail"] = std::move(avail);

    nlohmann::ordered_json share = nlohmann::ordered_json::object();
    for (const auto& [pair, lang] : b.share.sharingAt[pt])
      share[pair.first + "|" + pair.second] =
          langWords(b.share.system, lang, maxLen);
    entry["sharing"] = std::move(share);

    points.push_back(std::move(entry));
  }
  doc["byPoint"] = std::move(points);

  doc["stats"] = {{"functions", b.sp.program.defs.size()},
                  {"planPoints", plan.at.size()},
                  {"planStatements", planStatements}};
  return doc;
}

nlohmann::ordered_json traceJson(const RunResult& run) {
  nlohmann::ordered_json doc;
  doc["schema"] = "nullgc/1";
  doc["ok"] = run.ok;
  if (!run.ok) {
    doc["error"] = {{"point", run.error.point},
                    {"message", run.error.message}};
  } else {
    doc["value"] = show(run.value);
  }
  doc["steps"] = run.steps;
  doc["cells"] = run.cells.size();

  nlohmann::ordered_json events = nlohmann::ordered_json::array();
  for (const DerefEvent& d : run.derefs)
    events.push_back(
        {{"step", d.step}, {"point", d.point}, {"edge", show(d.edge)}});
  doc["derefs"] = std::move(events);

  nlohmann::ordered_json after = nlohmann::ordered_json::object();
  for (const auto& [pt, edges] : traceDerefs(run)) {
    std::vector<std::string> names;
    for (const EdgeId& e : edges) names.push_back(show(e));
    after[pt == kExitPoint ? "exit" : std::to_string(pt)] = std::move(names);
  }
  doc["after"] = std::move(after);
  return doc;
}

std::string reachTable(const ReachStats& st) {
  std::ostringstream os;
  os << " point | original | transformed | delta\n";
  os << "-------+----------+-------------+------\n";
  for (const ReachRow& r : st.rows) {
    os.width(6);
    os << r.point << " |";
    os.width(9);
    os << r.original << " |";
    os.width(12);
    os << r.transformed << " |";
    os.width(6);
    os << r.transformed - r.original << "\n";
  }
  if (st.divergent)
    os << "visit sequences diverge; rows are not aligned\n";
  return os.str();
}

}  // namespace nullgc
