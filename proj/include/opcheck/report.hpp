#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "opcheck/checker.hpp"
#include "opcheck/interp.hpp"
#include "opcheck/invgen.hpp"

namespace opcheck {

struct ReportContext {
  std::string file;
  Approach approach = Approach::IW;
  std::string solver;  // identity string
  std::string logic = "ALL";
  double timeout_s = 10;
  std::uint64_t seed = 1;
};

/// Passes applied by `simplify` and `simplify_with_solver`, listed in the
/// report.
const std::vector<std::string>& simplify_passes();

nlohmann::json to_json(const Witness& w);
nlohmann::json to_json(const Verdict& v);
nlohmann::json check_report(const ReportContext& ctx, const std::vector<Verdict>& verdicts);
nlohmann::json invgen_report(const ReportContext& ctx,
                             const std::vector<std::pair<std::string, InvGenResult>>& results,
                             const std::vector<QueryStat>& queries);

/// Pretty-printed with sorted keys and a trailing newline.
std::string dump_report(const nlohmann::json& j);

/// Copy of `j` with every "time_ms" member removed.
nlohmann::json without_timing(const nlohmann::json& j);

// ---------------------------------------------------------------------------
// Corpus
// ---------------------------------------------------------------------------

struct CorpusEntry {
  std::string file;
  std::string path;
  std::string source;
  bool op = true;  // expected to be observationally pure
  std::map<std::string, std::string> expect;  // procedure -> verdict name
};

struct CorpusError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Reads `manifest.json` in `dir` and every program it lists.
std::vector<CorpusEntry> load_corpus(const std::string& dir);

}  // namespace opcheck
