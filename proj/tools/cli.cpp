#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bjcc/config.hpp"
#include "bjcc/csv.hpp"
#include "bjcc/errors.hpp"
#include "bjcc/experiments.hpp"
#include "bjcc/gaussian_demo.hpp"
#include "bjcc/mcmc.hpp"
#include "bjcc/queue_model.hpp"
#include "bjcc/vb_engine.hpp"

#ifndef BJCC_VERSION
#define BJCC_VERSION "0.0.0"
#endif

namespace bjcc::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

// Options shared by the three experiment subcommands.
struct ExperimentFlags {
  std::string config_path;
  std::string manifest_path;
  std::string out_dir = "out";
  std::string profile;
  std::vector<double> betas;
  std::optional<double> alpha;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<std::size_t> replications;
  std::optional<int> c_probe;
};

struct RegionFlags {
  std::string config_path;
  std::string manifest_path;
  std::string out_dir = "out";
  double sigma = -0.1;
  double beta = 0.9;
  double threshold = 1.0;
  std::string method = "exact";
  std::size_t samples = 5000;
  bool metropolis = false;
  std::size_t burn_in = 3000;
  double step = 1.0;
  std::uint64_t seed = 1;
  double x_min = -10.0;
  double x_max = 10.0;
  std::size_t resolution = 201;
};

struct FitFlags {
  std::size_t n = 2000;
  std::uint64_t seed = 1;
  std::string data_path;
  std::string chain_out;
  std::string data_out;
  double lambda0 = 16.0;
  double mu0 = 1.0;
  std::size_t mcmc_total = 1000;
  std::size_t mcmc_burn_in = 200;
  double proposal_std = 0.05;
};

KeyValueConfig kv_from_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open manifest " + path.string());
  ordered_json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed manifest " + path.string() + ": " + e.what());
  }
  if (!doc.contains("config") || !doc["config"].is_object())
    throw ConfigError("manifest " + path.string() + " has no config object");
  KeyValueConfig kv;
  for (const auto& [key, value] : doc["config"].items()) {
    if (!value.is_string()) throw ConfigError("manifest config values must be strings ('" + key + "')");
    kv.set(key, value.get<std::string>());
  }
  return kv;
}

KeyValueConfig base_kv(const std::string& config_path, const std::string& manifest_path) {
  if (!config_path.empty() && !manifest_path.empty())
    throw ConfigError("--config and --manifest are mutually exclusive");
  if (!manifest_path.empty()) return kv_from_manifest(manifest_path);
  if (!config_path.empty()) return KeyValueConfig::load(config_path);
  return {};
}

std::string list_text(const std::vector<double>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + csv::format_double(v[i]);
  return out + "]";
}

ExperimentConfig resolve(const ExperimentFlags& f) {
  KeyValueConfig kv = base_kv(f.config_path, f.manifest_path);
  if (!f.profile.empty()) {
    // A profile flag resets to that profile's defaults under the file's keys.
    KeyValueConfig merged;
    merged.set("profile", f.profile);
    for (const auto& [k, v] : kv.entries())
      if (k != "profile") merged.set(k, v);
    kv = merged;
  }
  if (!f.betas.empty()) {
    kv.set("betas", list_text(f.betas));
    kv.set("beta", csv::format_double(f.betas.front()));
  }
  if (f.alpha) kv.set("alpha", csv::format_double(*f.alpha));
  if (f.seed) kv.set("seed", std::to_string(*f.seed));
  if (f.threads) kv.set("threads", std::to_string(*f.threads));
  if (f.replications) kv.set("replications", std::to_string(*f.replications));
  if (f.c_probe) kv.set("c_probe", std::to_string(*f.c_probe));
  return apply_config(default_config(Profile::Desk), kv);
}

void write_manifest(const fs::path& out_dir, const std::string& command, const KeyValueConfig& config,
                    const std::vector<std::string>& outputs, double seconds, const ordered_json& extra = {}) {
  ordered_json doc;
  doc["tool"] = "bjcc";
  doc["version"] = BJCC_VERSION;
  doc["command"] = command;
  ordered_json cfg = ordered_json::object();
  for (const auto& [k, v] : config.entries()) cfg[k] = v;
  doc["config"] = cfg;
  doc["seed_derivation"] = "cell seed = mix(base seed, n, replication); dataset stream 0, chain stream 1";
  doc["outputs"] = outputs;
  if (!extra.is_null()) doc["results"] = extra;
  doc["elapsed_seconds"] = seconds;
  csv::write_text(out_dir / "manifest.json", doc.dump(2) + "\n");
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void add_experiment_flags(CLI::App* sub, ExperimentFlags& f) {
  sub->add_option("--config", f.config_path, "Flat key = value config file")->check(CLI::ExistingFile);
  sub->add_option("--manifest", f.manifest_path, "Rerun with the config recorded in a manifest.json")
      ->check(CLI::ExistingFile);
  sub->add_option("--out-dir", f.out_dir, "Output directory")->capture_default_str();
  sub->add_option("--profile", f.profile, "desk (50 paths) or paper (250 paths)")
      ->check(CLI::IsMember({"desk", "paper"}));
  sub->add_option("--beta", f.betas, "Confidence level(s), comma separated")->delimiter(',');
  sub->add_option("--alpha", f.alpha, "Maximum fraction of customers delayed");
  sub->add_option("--seed", f.seed, "Base seed");
  sub->add_option("--threads", f.threads, "Worker threads");
  sub->add_option("--replications", f.replications, "Sample paths per n");
}

int run_consistency_cmd(const ExperimentFlags& f, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentConfig cfg = resolve(f);
  const QuantileTable table = run_consistency(cfg);
  const fs::path dir(f.out_dir);
  csv::write_text(dir / "consistency.csv", table.to_csv());
  write_manifest(dir, "consistency", to_key_values(cfg), {"consistency.csv"}, seconds_since(t0),
                 ordered_json{{"c_true", table.c_true}});
  out << "wrote " << (dir / "consistency.csv").string() << " (C* = " << table.c_true << ")\n";
  return 0;
}

int run_feasibility_cmd(const ExperimentFlags& f, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentConfig cfg = resolve(f);
  const FeasibilityTable table = run_feasibility_decay(cfg);
  const fs::path dir(f.out_dir);
  csv::write_text(dir / "feasibility.csv", table.to_csv());
  write_manifest(dir, "feasibility", to_key_values(cfg), {"feasibility.csv"}, seconds_since(t0),
                 ordered_json{{"c_probe", table.c_probe}});
  out << "wrote " << (dir / "feasibility.csv").string() << " (c_probe = " << table.c_probe << ")\n";
  return 0;
}

int run_rate_cmd(const ExperimentFlags& f, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentConfig cfg = resolve(f);
  const RateTable table = run_rate_check(cfg);
  const fs::path dir(f.out_dir);
  csv::write_text(dir / "rate.csv", table.to_csv());
  write_manifest(dir, "rate", to_key_values(cfg), {"rate.csv"}, seconds_since(t0),
                 ordered_json{{"c_true", table.c_true}, {"fitted_constant", table.fitted_constant}});
  out << "wrote " << (dir / "rate.csv").string() << " (M-hat = " << csv::format_double(table.fitted_constant)
      << ")\n";
  return 0;
}

// Region settings round-trip through the same flat key/value form as the
// experiment configs so a manifest can replay them.
KeyValueConfig region_kv(const RegionFlags& f) {
  KeyValueConfig kv;
  kv.set("sigma", csv::format_double(f.sigma));
  kv.set("beta", csv::format_double(f.beta));
  kv.set("threshold", csv::format_double(f.threshold));
  kv.set("method", f.method);
  kv.set("samples", std::to_string(f.samples));
  kv.set("metropolis", f.metropolis ? "true" : "false");
  kv.set("burn_in", std::to_string(f.burn_in));
  kv.set("step", csv::format_double(f.step));
  kv.set("seed", std::to_string(f.seed));
  kv.set("x_min", csv::format_double(f.x_min));
  kv.set("x_max", csv::format_double(f.x_max));
  kv.set("resolution", std::to_string(f.resolution));
  return kv;
}

void overlay_region(RegionFlags& f, const KeyValueConfig& kv, const CLI::App& sub) {
  static const std::vector<std::string> known = {"sigma", "beta",  "threshold", "method", "samples", "metropolis",
                                                 "burn_in", "step", "seed",     "x_min",  "x_max",   "resolution"};
  for (const auto& [k, v] : kv.entries())
    if (std::find(known.begin(), known.end(), k) == known.end()) throw ConfigError("unknown region key '" + k + "'");
  // Explicit flags win over file values.
  auto from_file = [&](const std::string& key, const std::string& flag) {
    return kv.has(key) && sub.count(flag) == 0;
  };
  auto nonneg = [&](const std::string& key) {
    const auto v = kv.get_int(key);
    if (v < 0) throw ConfigError("'" + key + "' must be nonnegative");
    return static_cast<std::size_t>(v);
  };
  if (from_file("sigma", "--sigma")) f.sigma = kv.get_double("sigma");
  if (from_file("beta", "--beta")) f.beta = kv.get_double("beta");
  if (from_file("threshold", "--threshold")) f.threshold = kv.get_double("threshold");
  if (from_file("method", "--method")) f.method = kv.raw("method");
  if (from_file("samples", "--samples")) f.samples = nonneg("samples");
  if (from_file("metropolis", "--metropolis")) f.metropolis = kv.get_bool("metropolis");
  if (from_file("burn_in", "--burn-in")) f.burn_in = nonneg("burn_in");
  if (from_file("step", "--step")) f.step = kv.get_double("step");
  if (from_file("seed", "--seed")) {
    const auto v = kv.get_int("seed");
    if (v < 0) throw ConfigError("'seed' must be nonnegative");
    f.seed = static_cast<std::uint64_t>(v);
  }
  if (from_file("x_min", "--x-min")) f.x_min = kv.get_double("x_min");
  if (from_file("x_max", "--x-max")) f.x_max = kv.get_double("x_max");
  if (from_file("resolution", "--resolution")) f.resolution = nonneg("resolution");
}

int run_region_cmd(RegionFlags f, const CLI::App& sub, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  overlay_region(f, base_kv(f.config_path, f.manifest_path), sub);
  if (!(f.beta > 0.0 && f.beta < 1.0)) throw ConfigError("--beta must lie in (0, 1)");
  if (!(f.x_max > f.x_min)) throw ConfigError("--x-max must exceed --x-min");
  const RegionMethod method = parse_region_method(f.method);
  LinearCC cc{[&] {
                try {
                  return unit_gaussian(f.sigma);
                } catch (const DomainError& e) {
                  throw ConfigError(std::string("--sigma: ") + e.what());
                }
              }(),
              f.threshold, f.beta};
  GridSpec grid{f.x_min, f.x_max, f.x_min, f.x_max, f.resolution, f.resolution};
  RegionOptions opts;
  opts.mc_samples = f.samples;
  opts.metropolis = f.metropolis;
  opts.metropolis_burn_in = f.burn_in;
  opts.metropolis_step = f.step;
  RegionGrid region;
  try {
    region = emit_region_grid(cc, method, grid, Seed{f.seed}, opts);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  const fs::path dir(f.out_dir);
  write_region_csv(region, dir / "region.csv");
  std::size_t feasible = 0;
  for (auto flag : region.flags) feasible += flag;
  write_manifest(dir, "region", region_kv(f), {"region.csv"}, seconds_since(t0),
                 ordered_json{{"feasible_cells", feasible}});
  out << "wrote " << (dir / "region.csv").string() << " (" << feasible << " feasible cells)\n";
  return 0;
}

int run_fit_cmd(const FitFlags& f, std::ostream& out) {
  const Dataset data = f.data_path.empty() ? simulate_dataset(TrueParams{f.lambda0, f.mu0}, f.n, Seed{f.seed})
                                           : read_dataset_csv(f.data_path);
  if (!f.data_out.empty()) write_dataset_csv(data, f.data_out);
  const SuffStats stats = suff_stats(data);
  const PriorSpec prior{};
  const VbFit fit = fit_vb(stats, prior);
  McmcConfig mc{f.mcmc_total, f.mcmc_burn_in, f.proposal_std, derive_seed(Seed{f.seed}, 1)};
  if (mc.burn_in >= mc.total_samples) throw ConfigError("--mcmc-burn-in must be below --mcmc-total");
  const McmcChain chain = run_chain(stats, prior, mc);
  if (!f.chain_out.empty()) write_chain_csv(chain, f.chain_out);

  double mean_lambda = 0.0;
  double mean_mu = 0.0;
  for (const auto& s : chain.samples) {
    mean_lambda += s.lambda;
    mean_mu += s.mu;
  }
  mean_lambda /= static_cast<double>(chain.samples.size());
  mean_mu /= static_cast<double>(chain.samples.size());

  const auto& q = fit.posterior;
  ordered_json doc;
  doc["n"] = stats.n;
  doc["sum_interarrival"] = stats.sum_interarrival;
  doc["sum_service"] = stats.sum_service;
  doc["vb"] = {{"a_q", q.q_lambda.shape()},       {"b_q", q.q_lambda.rate()},
               {"a_s", q.q_mu.shape()},           {"b_s", q.q_mu.rate()},
               {"mean_lambda", q.q_lambda.mean()}, {"mean_mu", q.q_mu.mean()},
               {"elbo", fit.report.value},         {"iterations", fit.report.iterations},
               {"converged", fit.report.converged}, {"gradient_norm", fit.report.gradient_norm}};
  doc["mcmc"] = {{"samples", chain.samples.size()},
                 {"acceptance_rate", chain.acceptance_rate},
                 {"mean_lambda", mean_lambda},
                 {"mean_mu", mean_mu}};
  out << doc.dump(2) << "\n";
  return 0;
}

} // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bayesian and variational chance-constrained M/M/c staffing"};
  app.require_subcommand(1);
  app.set_version_flag("--version", BJCC_VERSION);

  ExperimentFlags consistency;
  auto* cons = app.add_subcommand("consistency", "Quantiles of C*_VB and C*_MCMC across n (consistency.csv)");
  add_experiment_flags(cons, consistency);

  ExperimentFlags feasibility;
  auto* feas = app.add_subcommand("feasibility", "Inclusion frequency of an infeasible c in the VB set (feasibility.csv)");
  add_experiment_flags(feas, feasibility);
  feas->add_option("--c-probe", feasibility.c_probe, "Probed server count (default C* - 1)");

  ExperimentFlags rate;
  auto* rt = app.add_subcommand("rate", "Mis-staffing frequency against log(n)/n (rate.csv)");
  add_experiment_flags(rt, rate);

  RegionFlags region;
  auto* reg = app.add_subcommand("region", "Gaussian chance-constraint feasible region grid (region.csv)");
  reg->add_option("--config", region.config_path, "Flat key = value config file")->check(CLI::ExistingFile);
  reg->add_option("--manifest", region.manifest_path, "Rerun from a manifest.json")->check(CLI::ExistingFile);
  reg->add_option("--out-dir", region.out_dir, "Output directory")->capture_default_str();
  reg->add_option("--sigma", region.sigma, "Off-diagonal covariance")->capture_default_str();
  reg->add_option("--beta", region.beta, "Confidence level")->capture_default_str();
  reg->add_option("--threshold", region.threshold, "Right-hand side")->capture_default_str();
  reg->add_option("--method", region.method, "exact | mc | vb")->capture_default_str();
  reg->add_option("--samples", region.samples, "Monte-Carlo sample count")->capture_default_str();
  reg->add_flag("--metropolis", region.metropolis, "Draw Monte-Carlo samples with Metropolis-Hastings");
  reg->add_option("--burn-in", region.burn_in, "Metropolis burn-in")->capture_default_str();
  reg->add_option("--step", region.step, "Metropolis proposal std")->capture_default_str();
  reg->add_option("--seed", region.seed, "Sampling seed")->capture_default_str();
  reg->add_option("--x-min", region.x_min, "Lower grid bound (both axes)")->capture_default_str();
  reg->add_option("--x-max", region.x_max, "Upper grid bound (both axes)")->capture_default_str();
  reg->add_option("--resolution", region.resolution, "Grid points per axis")->capture_default_str();

  FitFlags fit;
  auto* ft = app.add_subcommand("fit", "Fit VB and MCMC posteriors to one dataset and print them");
  ft->add_option("--n", fit.n, "Simulated sample size")->capture_default_str();
  ft->add_option("--seed", fit.seed, "Simulation and chain seed")->capture_default_str();
  ft->add_option("--data", fit.data_path, "Read the dataset from an interarrival,service CSV")
      ->check(CLI::ExistingFile);
  ft->add_option("--data-out", fit.data_out, "Write the dataset CSV");
  ft->add_option("--chain-out", fit.chain_out, "Write the MCMC chain CSV");
  ft->add_option("--lambda0", fit.lambda0, "True arrival rate for simulation")->capture_default_str();
  ft->add_option("--mu0", fit.mu0, "True service rate for simulation")->capture_default_str();
  ft->add_option("--mcmc-total", fit.mcmc_total, "Chain length including burn-in")->capture_default_str();
  ft->add_option("--mcmc-burn-in", fit.mcmc_burn_in, "Burn-in")->capture_default_str();
  ft->add_option("--proposal-std", fit.proposal_std, "Random-walk std in log space")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*cons) return run_consistency_cmd(consistency, out);
    if (*feas) return run_feasibility_cmd(feasibility, out);
    if (*rt) return run_rate_cmd(rate, out);
    if (*reg) return run_region_cmd(region, *reg, out);
    if (*ft) return run_fit_cmd(fit, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const InfeasibleError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

} // namespace bjcc::cli
