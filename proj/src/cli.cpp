#include "agg/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "agg/calibration.hpp"
#include "agg/config.hpp"
#include "agg/convex.hpp"
#include "agg/diagnostics.hpp"
#include "agg/errors.hpp"
#include "agg/outputs.hpp"
#include "agg/probes.hpp"
#include "agg/selectors.hpp"
#include "agg/simulation.hpp"

namespace agg {

namespace {

using nlohmann::json;

json exponent_json(double p) { return std::isinf(p) ? json("inf") : json(p); }

EstimatorFamily load_family(const std::string& path) {
  return EstimatorFamily(read_vectors_csv(path));
}

Vector load_observation(const std::string& path, std::size_t n) {
  auto rows = read_vectors_csv(path);
  if (rows.size() != 1) throw DimensionError("observation file must hold a single row");
  if (rows.front().size() != n) throw DimensionError("observation length differs from family");
  return rows.front();
}

void check_writable_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
  auto probe = dir / ".write_check";
  {
    std::ofstream test(probe);
    if (!test) throw IoError("output directory '" + dir.string() + "' is not writable");
  }
  std::filesystem::remove(probe, ec);
}

// Options shared by commands that take a family file.
struct FamilyArgs {
  std::string family;
  std::string obs;
  std::string p_token = "2";
  std::string weights = "unit";
};

SpaceWeights make_weights(const std::string& kind, std::size_t n) {
  if (kind == "unit") return SpaceWeights::unit(n);
  if (kind == "grid") return SpaceWeights::grid(n);
  throw ConfigError("unknown weights '" + kind + "' (expected unit or grid)");
}

Covariance covariance_for(const SpaceWeights& w) {
  return Covariance::diagonal(Vector(w.values().begin(), w.values().end()));
}

ProbeKind default_kind(double p) { return std::isinf(p) ? ProbeKind::Hat : ProbeKind::Tilde; }

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Estimator aggregation via probe functionals"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Replicate the sparse normal-means study");
  std::string config_path, out_dir, rule_token, scenario_token, k_list, format_token;
  std::uint64_t seed = 0;
  std::size_t reps = 0;
  sim->add_option("--config", config_path, "key = value configuration file");
  sim->add_option("--out", out_dir, "output directory");
  sim->add_option("--seed", seed, "base seed");
  sim->add_option("--rule", rule_token, "hat, tilde or l2exact");
  sim->add_option("--scenario", scenario_token, "i or ii");
  sim->add_option("--K", k_list, "comma-separated sparsity list");
  sim->add_option("--reps", reps, "replications per K");
  sim->add_option("--format", format_token, "csv, json or both");

  // select
  auto* sel = app.add_subcommand("select", "Select one member of a family for an observation");
  FamilyArgs sel_args;
  std::string sel_rule = "tilde";
  double sel_eps = 1.0;
  double sel_delta = 0.0;
  sel->add_option("--family", sel_args.family, "family CSV, one member per row")->required();
  sel->add_option("--obs", sel_args.obs, "observation CSV, single row")->required();
  sel->add_option("--rule", sel_rule, "hat, tilde or l2exact");
  sel->add_option("--p", sel_args.p_token, "norm exponent (real >= 1 or inf)");
  sel->add_option("--eps", sel_eps, "noise level (hat rule)");
  sel->add_option("--delta", sel_delta, "confidence level (hat rule, default eps)");
  sel->add_option("--weights", sel_args.weights, "unit or grid");

  // probes-check
  auto* chk = app.add_subcommand("probes-check", "Build a probe set and report its goodness");
  FamilyArgs chk_args;
  std::string chk_kind;
  double chk_gamma = 0.0;
  std::string chk_out;
  chk->add_option("--family", chk_args.family, "family CSV")->required();
  chk->add_option("--p", chk_args.p_token, "target exponent");
  chk->add_option("--kind", chk_kind, "tilde, hat, bar or l2_midpoint");
  chk->add_option("--gamma", chk_gamma, "slack for bar probes");
  chk->add_option("--weights", chk_args.weights, "unit or grid");
  chk->add_option("--out", chk_out, "write the probe table CSV here");

  // adversary
  auto* adv = app.add_subcommand("adversary", "Empirical regret on the disjoint-block family");
  std::size_t adv_N = 5, adv_n = 10000, adv_reps = 500;
  double adv_L = 2.0, adv_eps = 0.1;
  std::string adv_p = "inf", adv_kind = "hat";
  std::uint64_t adv_seed = 1;
  adv->add_option("--N", adv_N, "family size (> 3)");
  adv->add_option("--L", adv_L, "amplitude");
  adv->add_option("--eps", adv_eps, "noise level");
  adv->add_option("--n", adv_n, "grid size");
  adv->add_option("--reps", adv_reps, "replications per truth");
  adv->add_option("--seed", adv_seed, "seed");
  adv->add_option("--p", adv_p, "risk exponent in (2, inf]");
  adv->add_option("--kind", adv_kind, "hat or bar");

  // convex
  auto* cvx = app.add_subcommand("convex", "Convex aggregation over a simplex net");
  FamilyArgs cvx_args;
  double cvx_eta = 0.0, cvx_eps = 1.0, cvx_delta = 0.0;
  std::string cvx_kind, cvx_out;
  std::size_t cvx_cap = kDefaultNetCap;
  cvx->add_option("--family", cvx_args.family, "base family CSV")->required();
  cvx->add_option("--obs", cvx_args.obs, "observation CSV")->required();
  cvx->add_option("--eta", cvx_eta, "net radius (default eps)");
  cvx->add_option("--eps", cvx_eps, "noise level");
  cvx->add_option("--delta", cvx_delta, "confidence level (default eps)");
  cvx->add_option("--p", cvx_args.p_token, "norm exponent");
  cvx->add_option("--kind", cvx_kind, "probe family");
  cvx->add_option("--cap", cvx_cap, "maximum net cardinality");
  cvx->add_option("--weights", cvx_args.weights, "unit or grid");
  cvx->add_option("--out", cvx_out, "write convex.csv into this directory");

  // calibrate
  auto* cal = app.add_subcommand("calibrate", "Noise threshold for a family's probe set");
  FamilyArgs cal_args;
  std::string cal_kind, cal_method = "analytic";
  double cal_delta = 0.05, cal_gamma = 0.0;
  std::size_t cal_reps = 100000;
  std::uint64_t cal_seed = 1;
  cal->add_option("--family", cal_args.family, "family CSV")->required();
  cal->add_option("--p", cal_args.p_token, "target exponent");
  cal->add_option("--kind", cal_kind, "probe family");
  cal->add_option("--gamma", cal_gamma, "slack for bar probes");
  cal->add_option("--delta", cal_delta, "confidence level");
  cal->add_option("--method", cal_method, "analytic or mc");
  cal->add_option("--reps", cal_reps, "Monte-Carlo replications");
  cal->add_option("--seed", cal_seed, "Monte-Carlo seed");
  cal->add_option("--weights", cal_args.weights, "unit or grid");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (sim->parsed()) {
      RunConfig cfg = config_path.empty() ? parse_config("") : load_config(config_path);
      ScenarioConfig& sc = cfg.scenario;
      if (!scenario_token.empty()) {
        sc.scenario = scenario_from_string(scenario_token);
        if (k_list.empty()) sc.K = default_sparsities(sc.scenario);
      }
      if (!k_list.empty()) sc.K = parse_config("K = " + k_list).scenario.K;
      if (sim->count("--seed")) sc.base_seed = seed;
      if (sim->count("--reps")) sc.reps = reps;
      if (!rule_token.empty()) sc.rule = rule_from_string(rule_token);
      if (!format_token.empty()) cfg.format = format_from_string(format_token);
      if (!out_dir.empty()) cfg.out_dir = out_dir;
      sc.validate();
      if (cfg.out_dir.empty()) throw ConfigError("simulate: --out (or config key out) is required");
      check_writable_dir(cfg.out_dir);

      ExperimentSummary summary = run_experiment(sc);
      write_outputs(summary, cfg.out_dir, cfg.format);
      out << summary_csv(summary);
      return 0;
    }

    if (sel->parsed()) {
      EstimatorFamily family = load_family(sel_args.family);
      const double p = parse_exponent(sel_args.p_token);
      const SpaceWeights w = make_weights(sel_args.weights, family.dim());
      family.validate(w, p);
      Vector y = load_observation(sel_args.obs, family.dim());
      const Rule rule = rule_from_string(sel_rule);
      Selection s;
      if (rule == Rule::L2Exact) {
        s = select_l2_exact(y, family, w);
      } else {
        NoiseSpec noise{sel_eps, covariance_for(w)};
        ProbeSet set = build_probe_set(family, w, p, default_kind(p), std::nullopt, &noise.sigma);
        if (rule == Rule::Tilde) {
          s = select_tilde(y, family, set, NormSpec::from_p(p), w);
        } else {
          double delta = sel_delta > 0.0 ? sel_delta : clamp_delta(sel_eps);
          s = select_hat(y, family, set, noise, calibrate_analytic(set, delta), NormSpec::from_p(p), w);
        }
      }
      out << to_json(s).dump(2) << "\n";
      return 0;
    }

    if (chk->parsed()) {
      EstimatorFamily family = load_family(chk_args.family);
      const double p = parse_exponent(chk_args.p_token);
      const SpaceWeights w = make_weights(chk_args.weights, family.dim());
      ProbeKind kind = chk_kind.empty() ? default_kind(p) : probe_kind_from_string(chk_kind);
      std::optional<double> gamma;
      if (chk_gamma > 0.0) gamma = chk_gamma;
      ProbeSet set = build_probe_set(family, w, p, kind, gamma);
      GoodnessReport r = check_goodness(set, family, w, p);
      if (!chk_out.empty()) write_file_atomic(chk_out, probe_set_csv(set));
      out << json{{"kind", to_string(kind)},
                  {"p", exponent_json(p)},
                  {"probes", set.size()},
                  {"gamma", r.gamma},
                  {"max_slack", r.max_slack},
                  {"worst_pair", {r.worst_i + 1, r.worst_j + 1}},
                  {"pass", r.pass}}
                 .dump(2)
          << "\n";
      return r.pass ? 0 : 2;
    }

    if (adv->parsed()) {
      const double p = parse_exponent(adv_p);
      AdversaryReport r = adversary_experiment(adv_N, adv_L, adv_eps, adv_n, adv_reps, adv_seed, p,
                                               probe_kind_from_string(adv_kind));
      out << json{{"N", adv_N},
                  {"L", adv_L},
                  {"eps", adv_eps},
                  {"n", adv_n},
                  {"p", exponent_json(p)},
                  {"reps", adv_reps},
                  {"block_size", r.setup.block_size},
                  {"h", r.setup.h},
                  {"h_star", r.setup.h_star},
                  {"kappa", r.kappa},
                  {"mean_regret", r.mean_regret},
                  {"max_mean_regret", r.max_mean_regret},
                  {"lower_bound", r.lower_bound},
                  {"ratio", r.max_mean_regret / r.lower_bound}}
                 .dump(2)
          << "\n";
      return 0;
    }

    if (cvx->parsed()) {
      EstimatorFamily base = load_family(cvx_args.family);
      const double p = parse_exponent(cvx_args.p_token);
      const SpaceWeights w = make_weights(cvx_args.weights, base.dim());
      Vector y = load_observation(cvx_args.obs, base.dim());
      NoiseSpec noise{cvx_eps, covariance_for(w)};
      const double eta = cvx_eta > 0.0 ? cvx_eta : cvx_eps;
      const double delta = cvx_delta > 0.0 ? cvx_delta : clamp_delta(cvx_eps);
      ProbeKind kind = cvx_kind.empty() ? default_kind(p) : probe_kind_from_string(cvx_kind);
      ConvexOptions opts;
      opts.cap = cvx_cap;
      if (!cvx_out.empty()) check_writable_dir(cvx_out);
      ConvexResult r = select_convex(y, base, eta, kind, noise, delta, NormSpec::from_p(p), w, opts);
      const double norm = weighted_p_norm(r.aggregate, w, p);
      if (!cvx_out.empty()) {
        std::ostringstream csv;
        csv << "lambda_index,lambda\n";
        for (std::size_t i = 0; i < r.lambda.size(); ++i) csv << i + 1 << ',' << r.lambda[i] << '\n';
        csv << "# selected_norm," << norm << '\n';
        write_file_atomic(std::filesystem::path(cvx_out) / "convex.csv", csv.str());
      }
      out << json{{"lambda", r.lambda},
                  {"selected_norm", norm},
                  {"net_points", r.net.points.size()},
                  {"collapsed_duplicates", r.collapsed_duplicates},
                  {"kappa", r.kappa},
                  {"gamma", r.gamma},
                  {"score", r.selection.scores[r.selection.chosen]}}
                 .dump(2)
          << "\n";
      return 0;
    }

    if (cal->parsed()) {
      EstimatorFamily family = load_family(cal_args.family);
      const double p = parse_exponent(cal_args.p_token);
      const SpaceWeights w = make_weights(cal_args.weights, family.dim());
      ProbeKind kind = cal_kind.empty() ? default_kind(p) : probe_kind_from_string(cal_kind);
      std::optional<double> gamma;
      if (cal_gamma > 0.0) gamma = cal_gamma;
      Covariance sigma = covariance_for(w);
      ProbeSet set = build_probe_set(family, w, p, kind, gamma, &sigma);
      json j{{"probes", set.size()},
             {"delta", cal_delta},
             {"kappa_analytic", kappa_analytic(set.size(), cal_delta)}};
      if (cal_method == "mc") {
        j["kappa_monte_carlo"] = kappa_monte_carlo(set, sigma, cal_delta, cal_reps, cal_seed);
        j["reps"] = cal_reps;
        j["seed"] = cal_seed;
      } else if (cal_method != "analytic") {
        throw ConfigError("unknown method '" + cal_method + "' (expected analytic or mc)");
      }
      out << j.dump(2) << "\n";
      return 0;
    }
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.push_back("aggregate");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace agg
