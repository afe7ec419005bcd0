#include "opcheck/report.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace opcheck {

using nlohmann::json;

const std::vector<std::string>& simplify_passes() {
  static const std::vector<std::string> passes = {
      "constant-folding",
      "boolean-laws",
      "flatten-and-dedupe",
      "complement-detection",
      "unused-quantifier-removal",
      "one-point-rule",
      "existential-distribution-and-miniscoping",
      "solver-decided-closed-subformulas",
      "solver-redundant-conjuncts",
      "solver-disjunct-subsumption",
  };
  return passes;
}

namespace {

json seq_json(const CallSeq& s) {
  json out = json::array();
  for (const auto& [proc, args] : s) out.push_back({{"proc", proc}, {"args", args}});
  return out;
}

json queries_json(const std::vector<QueryStat>& qs) {
  json out = json::array();
  for (const auto& q : qs)
    out.push_back({{"index", q.index},
                   {"label", q.label},
                   {"answer", to_string(q.answer)},
                   {"time_ms", q.time_ms}});
  return out;
}

double total_ms(const std::vector<QueryStat>& qs) {
  double t = 0;
  for (const auto& q : qs) t += q.time_ms;
  return t;
}

json context_json(const ReportContext& ctx) {
  return {{"file", ctx.file},
          {"approach", to_string(ctx.approach)},
          {"seed", ctx.seed},
          {"solver", {{"identity", ctx.solver}, {"logic", ctx.logic}, {"timeout_s", ctx.timeout_s}}},
          {"simplify", simplify_passes()}};
}

}  // namespace

json to_json(const Witness& w) {
  return {{"proc", w.proc},
          {"args", w.args},
          {"first", w.first},
          {"second", w.second},
          {"first_sequence", seq_json(w.first_sequence)},
          {"second_sequence", seq_json(w.second_sequence)}};
}

json to_json(const Verdict& v) {
  json j = {{"name", v.proc},
            {"verdict", to_string(v.kind)},
            {"kind", v.kind == VerdictKind::NotCertified ? json(to_string(v.failure)) : json(nullptr)},
            {"reason", v.reason.empty() ? json(nullptr) : json(v.reason)},
            {"note", v.note.empty() ? json(nullptr) : json(v.note)},
            {"model", v.model},
            {"witness", v.witness ? to_json(*v.witness) : json(nullptr)},
            {"queries", queries_json(v.stats.queries)},
            {"time_ms", total_ms(v.stats.queries)}};
  return j;
}

json check_report(const ReportContext& ctx, const std::vector<Verdict>& verdicts) {
  json j = context_json(ctx);
  j["command"] = "check";
  json procs = json::array();
  for (const auto& v : verdicts) procs.push_back(to_json(v));
  j["procedures"] = procs;
  j["exit_code"] = exit_code(verdicts);
  return j;
}

json invgen_report(const ReportContext& ctx,
                   const std::vector<std::pair<std::string, InvGenResult>>& results,
                   const std::vector<QueryStat>& queries) {
  json j = context_json(ctx);
  j["command"] = "gen-invariant";
  json procs = json::array();
  for (const auto& [name, r] : results) {
    json hist = json::array();
    for (const auto& h : r.history) hist.push_back(to_string(h));
    procs.push_back({{"name", name},
                     {"converged", r.converged},
                     {"iterations", r.iterations},
                     {"invariant", to_string(r.invariant)},
                     {"history", hist},
                     {"reason", r.reason.empty() ? json(nullptr) : json(r.reason)}});
  }
  j["procedures"] = procs;
  j["queries"] = queries_json(queries);
  j["time_ms"] = total_ms(queries);
  return j;
}

std::string dump_report(const json& j) { return j.dump(2) + "\n"; }

json without_timing(const json& j) {
  if (j.is_object()) {
    json out = json::object();
    for (const auto& [k, v] : j.items())
      if (k != "time_ms") out[k] = without_timing(v);
    return out;
  }
  if (j.is_array()) {
    json out = json::array();
    for (const auto& v : j) out.push_back(without_timing(v));
    return out;
  }
  return j;
}

// ---------------------------------------------------------------------------
// Corpus
// ---------------------------------------------------------------------------

std::vector<CorpusEntry> load_corpus(const std::string& dir) {
  namespace fs = std::filesystem;
  fs::path manifest = fs::path(dir) / "manifest.json";
  std::ifstream in(manifest);
  if (!in) throw CorpusError("missing corpus manifest " + manifest.string());
  json m;
  try {
    in >> m;
  } catch (const json::exception& e) {
    throw CorpusError("corrupt corpus manifest: " + std::string(e.what()));
  }
  if (!m.is_object() || !m.contains("entries") || !m["entries"].is_array())
    throw CorpusError("corpus manifest has no entries array");

  std::vector<CorpusEntry> out;
  for (const auto& e : m["entries"]) {
    CorpusEntry c;
    try {
      c.file = e.at("file").get<std::string>();
      c.op = e.at("op").get<bool>();
      c.expect = e.at("expect").get<std::map<std::string, std::string>>();
    } catch (const json::exception& ex) {
      throw CorpusError("corrupt corpus entry: " + std::string(ex.what()));
    }
    c.path = (fs::path(dir) / c.file).string();
    std::ifstream src(c.path);
    if (!src) throw CorpusError("missing corpus file " + c.path);
    std::ostringstream ss;
    ss << src.rdbuf();
    c.source = ss.str();
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace opcheck
