#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "nullgc/interp.hpp"
#include "nullgc/nullify.hpp"

namespace nullgc {

// Forward words of a variable's live language at a point, shortlex, up to
// maxLen symbols, rendered with the usual path spelling.
std::vector<std::string> liveWords(AnalysisBundle& b, ProgramPoint pt,
                                   const std::string& var, int maxLen);

// Words of a solved symbolic language (sharing entries), shortlex, capped.
std::vector<std::string> langWords(const LangSystem& sys, const Lang& l,
                                   int maxLen);

// Machine-readable digest of all three analyses plus the nullification plan.
// Schema "nullgc/1"; word lists enumerate every language up to maxLen.
nlohmann::ordered_json buildReport(AnalysisBundle& b, int maxLen);

// Dereference trace of one run as JSON, schema "nullgc/1".
nlohmann::ordered_json traceJson(const RunResult& run);

// Plain-text table comparing per-point reachable-cell counts of a program
// against its transformed version.
std::string reachTable(const ReachStats& st);

}  // namespace nullgc
