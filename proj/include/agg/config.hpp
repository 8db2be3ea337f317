#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "agg/simulation.hpp"

namespace agg {

enum class Command { Simulate, Select, ProbesCheck, Adversary, Convex, Calibrate };
enum class OutputFormat { Csv, Json, Both };

std::string to_string(Command c);
Command command_from_string(const std::string& s);
OutputFormat format_from_string(const std::string& s);

struct RunConfig {
  std::optional<Command> command;
  ScenarioConfig scenario;
  std::string out_dir;
  std::string family_path;
  std::string obs_path;
  OutputFormat format = OutputFormat::Both;
};

/// Parses an exponent token: a real >= 1, or "inf" / "infinity".
double parse_exponent(const std::string& token);

/// `key = value` lines, `#` starts a comment. Recognized keys: scenario, n, K
/// (comma list), spike_value, eps1, eps2, reps, seed, rule, p, delta, threads,
/// format, out. Missing keys keep their defaults; K defaults to the standard
/// list of the chosen scenario. Unknown or duplicate keys and malformed values
/// throw ConfigError.
RunConfig parse_config(std::string_view text);

RunConfig load_config(const std::string& path);

}  // namespace agg
