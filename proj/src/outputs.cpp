#include "agg/outputs.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "agg/errors.hpp"

namespace agg {

using nlohmann::json;

namespace {

std::string fixed3(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", x);
  return buf;
}

template <typename T>
std::vector<T> as_vector(const json& j) {
  return j.get<std::vector<T>>();
}

bool parse_row(const std::string& line, Vector& out) {
  out.clear();
  std::stringstream in(line);
  std::string cell;
  while (std::getline(in, cell, ',')) {
    std::size_t used = 0;
    try {
      out.push_back(std::stod(cell, &used));
    } catch (...) {
      return false;
    }
    while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) ++used;
    if (used != cell.size()) return false;
  }
  return !out.empty();
}

}  // namespace

std::string summary_csv(const ExperimentSummary& s) {
  std::ostringstream out;
  out << "scenario,K,oracle,aggregation,best_projection,best_thresholding,khat\n";
  for (const auto& r : s.rows) {
    out << to_string(s.scenario) << ',' << r.K << ',' << fixed3(r.oracle) << ','
        << fixed3(r.aggregation) << ',' << fixed3(r.best_projection) << ','
        << fixed3(r.best_thresholding) << ',' << fixed3(r.khat) << '\n';
  }
  return out.str();
}

std::string ranks_csv(const ExperimentSummary& s) {
  std::ostringstream out;
  out << "K,rank,count\n";
  for (const auto& r : s.rows) {
    for (std::size_t k = 0; k < r.ranks.rank_histogram.size(); ++k) {
      out << r.K << ',' << k + 1 << ',' << r.ranks.rank_histogram[k] << '\n';
    }
  }
  return out.str();
}

std::string selections_csv(const ExperimentSummary& s) {
  std::ostringstream out;
  out << "K,estimator_index,count,mean_risk\n";
  for (const auto& r : s.rows) {
    for (std::size_t i = 0; i < r.ranks.selection_counts.size(); ++i) {
      out << r.K << ',' << i + 1 << ',' << r.ranks.selection_counts[i] << ','
          << fixed3(r.ranks.mean_risk[i]) << '\n';
    }
  }
  return out.str();
}

json to_json(const ExperimentSummary& s) {
  json j;
  j["scenario"] = to_string(s.scenario);
  j["rule"] = to_string(s.rule);
  j["p"] = std::isinf(s.p) ? json("inf") : json(s.p);
  j["n"] = s.n;
  j["reps"] = s.reps;
  j["base_seed"] = s.base_seed;
  j["rows"] = json::array();
  for (const auto& r : s.rows) {
    j["rows"].push_back({{"K", r.K},
                         {"oracle", r.oracle},
                         {"aggregation", r.aggregation},
                         {"best_projection", r.best_projection},
                         {"best_thresholding", r.best_thresholding},
                         {"khat", r.khat},
                         {"thm7_remainder", r.thm7_remainder},
                         {"rank_histogram", r.ranks.rank_histogram},
                         {"selection_counts", r.ranks.selection_counts},
                         {"mean_risk", r.ranks.mean_risk}});
  }
  return j;
}

ExperimentSummary summary_from_json(const json& j) {
  ExperimentSummary s;
  s.scenario = scenario_from_string(j.at("scenario").get<std::string>());
  s.rule = rule_from_string(j.at("rule").get<std::string>());
  s.p = j.at("p").is_string() ? kInf : j.at("p").get<double>();
  s.n = j.at("n").get<std::size_t>();
  s.reps = j.at("reps").get<std::size_t>();
  s.base_seed = j.at("base_seed").get<std::uint64_t>();
  for (const auto& jr : j.at("rows")) {
    SummaryRow r;
    r.K = jr.at("K").get<std::size_t>();
    r.oracle = jr.at("oracle").get<double>();
    r.aggregation = jr.at("aggregation").get<double>();
    r.best_projection = jr.at("best_projection").get<double>();
    r.best_thresholding = jr.at("best_thresholding").get<double>();
    r.khat = jr.at("khat").get<double>();
    r.thm7_remainder = jr.at("thm7_remainder").get<double>();
    r.ranks.rank_histogram = as_vector<std::size_t>(jr.at("rank_histogram"));
    r.ranks.selection_counts = as_vector<std::size_t>(jr.at("selection_counts"));
    r.ranks.mean_risk = as_vector<double>(jr.at("mean_risk"));
    s.rows.push_back(std::move(r));
  }
  return s;
}

json to_json(const Selection& s) {
  std::vector<std::size_t> ties;
  for (std::size_t t : s.ties) ties.push_back(t + 1);
  return {{"rule", to_string(s.rule)}, {"chosen", s.chosen + 1}, {"scores", s.scores}, {"ties", ties}};
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw IoError("cannot move '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
  }
}

void write_outputs(const ExperimentSummary& s, const std::filesystem::path& dir, OutputFormat fmt) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
  if (fmt != OutputFormat::Json) {
    write_file_atomic(dir / "summary.csv", summary_csv(s));
    write_file_atomic(dir / "ranks.csv", ranks_csv(s));
    write_file_atomic(dir / "selections.csv", selections_csv(s));
  }
  if (fmt != OutputFormat::Csv) write_file_atomic(dir / "summary.json", to_json(s).dump(2) + "\n");
}

std::vector<Vector> read_vectors_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::vector<Vector> rows;
  std::string line;
  bool first = true;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    Vector row;
    if (!parse_row(line, row)) {
      if (first) {
        first = false;
        continue;
      }
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": malformed row");
    }
    first = false;
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw DimensionError(path.string() + ":" + std::to_string(line_no) + ": row length differs");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError("'" + path.string() + "' holds no data rows");
  return rows;
}

}  // namespace agg
