#include "agg/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "agg/errors.hpp"

namespace agg {

namespace {

std::string trim(std::string_view s) {
  auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string_view::npos) return {};
  auto end = s.find_last_not_of(" \t\r");
  return std::string(s.substr(begin, end - begin + 1));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

double to_double(const std::string& key, const std::string& value) {
  std::istringstream in(value);
  double x = 0.0;
  in >> x;
  if (in.fail() || !in.eof()) throw ConfigError(key + ": expected a number, got '" + value + "'");
  return x;
}

std::uint64_t to_uint(const std::string& key, const std::string& value) {
  std::uint64_t x = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), x);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError(key + ": expected a non-negative integer, got '" + value + "'");
  }
  return x;
}

std::vector<std::size_t> to_list(const std::string& key, const std::string& value) {
  std::vector<std::size_t> out;
  std::stringstream in(value);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(to_uint(key, trim(item)));
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

}  // namespace

std::string to_string(Command c) {
  switch (c) {
    case Command::Simulate: return "simulate";
    case Command::Select: return "select";
    case Command::ProbesCheck: return "probes-check";
    case Command::Adversary: return "adversary";
    case Command::Convex: return "convex";
    case Command::Calibrate: return "calibrate";
  }
  return "unknown";
}

Command command_from_string(const std::string& s) {
  for (Command c : {Command::Simulate, Command::Select, Command::ProbesCheck, Command::Adversary,
                    Command::Convex, Command::Calibrate}) {
    if (to_string(c) == s) return c;
  }
  throw ConfigError("unknown command '" + s + "'");
}

OutputFormat format_from_string(const std::string& s) {
  if (s == "csv") return OutputFormat::Csv;
  if (s == "json") return OutputFormat::Json;
  if (s == "both") return OutputFormat::Both;
  throw ConfigError("unknown format '" + s + "' (expected csv, json or both)");
}

double parse_exponent(const std::string& token) {
  const std::string t = lower(trim(token));
  if (t == "inf" || t == "infinity") return kInf;
  double p = to_double("p", t);
  if (std::isnan(p) || p < 1.0) throw ConfigError("p must lie in [1, inf], got '" + token + "'");
  return p;
}

RunConfig parse_config(std::string_view text) {
  std::map<std::string, std::string> entries;
  std::vector<std::string> unknown;
  static const std::vector<std::string> known = {"scenario", "n",   "K",     "spike_value",
                                                 "eps1",     "eps2", "reps", "seed",
                                                 "rule",     "p",   "delta", "threads",
                                                 "format",   "out"};
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::string body = trim(line);
    if (body.empty()) continue;
    auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    std::string key = trim(std::string_view(body).substr(0, eq));
    std::string value = trim(std::string_view(body).substr(eq + 1));
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      unknown.push_back(key);
      continue;
    }
    if (!entries.emplace(key, value).second) throw ConfigError("duplicate key '" + key + "'");
  }
  if (!unknown.empty()) {
    std::string msg = "unknown config keys:";
    for (const auto& k : unknown) msg += " " + k;
    throw ConfigError(msg);
  }

  RunConfig cfg;
  ScenarioConfig& sc = cfg.scenario;
  auto get = [&](const std::string& key) -> const std::string* {
    auto it = entries.find(key);
    return it == entries.end() ? nullptr : &it->second;
  };
  if (auto v = get("scenario")) sc.scenario = scenario_from_string(*v);
  sc.K = default_sparsities(sc.scenario);
  if (auto v = get("n")) sc.n = to_uint("n", *v);
  if (auto v = get("K")) sc.K = to_list("K", *v);
  if (auto v = get("spike_value")) sc.spike_value = to_double("spike_value", *v);
  if (auto v = get("eps1")) sc.eps1 = to_double("eps1", *v);
  if (auto v = get("eps2")) sc.eps2 = to_double("eps2", *v);
  if (auto v = get("reps")) sc.reps = to_uint("reps", *v);
  if (auto v = get("seed")) sc.base_seed = to_uint("seed", *v);
  if (auto v = get("rule")) sc.rule = rule_from_string(*v);
  if (auto v = get("p")) sc.p = parse_exponent(*v);
  if (auto v = get("delta")) sc.delta = to_double("delta", *v);
  if (auto v = get("threads")) sc.threads = to_uint("threads", *v);
  if (auto v = get("format")) cfg.format = format_from_string(*v);
  if (auto v = get("out")) cfg.out_dir = *v;
  sc.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace agg
