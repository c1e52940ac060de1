#include "bjcc/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <optional>
#include <set>
#include <thread>

#include "bjcc/csv.hpp"
#include "bjcc/erlang.hpp"
#include "bjcc/errors.hpp"

namespace bjcc {

namespace {

constexpr std::uint64_t kDataStream = 0;
constexpr std::uint64_t kChainStream = 1;

const std::set<std::string> kKnownKeys = {
    "profile",          "lambda0",          "mu0",          "prior_lambda_shape", "prior_lambda_scale",
    "prior_mu_shape",   "prior_mu_scale",   "alpha",        "beta",               "betas",
    "c_max",            "n_grid",           "replications", "mcmc",               "mcmc_total",
    "mcmc_burn_in",     "mcmc_proposal_std", "seed",        "c_probe",            "threads",
    "vb_tolerance",     "vb_max_iterations"};

std::string list_text(const std::vector<double>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + csv::format_double(v[i]);
  return out + "]";
}

std::string list_text(const std::vector<std::size_t>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + std::to_string(v[i]);
  return out + "]";
}

std::size_t nonnegative(const KeyValueConfig& kv, const std::string& key) {
  const auto v = kv.get_int(key);
  if (v < 0) throw ConfigError("'" + key + "' must be nonnegative");
  return static_cast<std::size_t>(v);
}

// Runs fn(i) for i in [0, count) on up to `threads` workers. Each index is
// written by exactly one worker, so results merge in index order.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn) {
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count || failed.load()) return;
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

struct Cell {
  bool vb_converged = false;
  std::optional<ProductGammaPosterior> posterior;
  std::vector<std::optional<int>> c_vb;   // per beta
  std::vector<std::optional<int>> c_mcmc; // per beta
};

std::optional<int> try_solve(const std::function<double(int)>& prob, StaffingSpec spec, double beta, int hint) {
  spec.beta = beta;
  try {
    return solve_staffing(prob, spec, hint).c_star;
  } catch (const InfeasibleError&) {
    return std::nullopt;
  }
}

Cell run_cell(const ExperimentConfig& cfg, std::size_t n, std::size_t rep, const std::vector<double>& betas,
              bool with_mcmc) {
  const Seed seed = cell_seed(cfg.base_seed, n, rep);
  const Dataset data = simulate_dataset(cfg.true_params, n, derive_seed(seed, kDataStream));
  const SuffStats stats = suff_stats(data);
  const double alpha = cfg.staffing.alpha;

  Cell cell;
  cell.c_vb.assign(betas.size(), std::nullopt);
  cell.c_mcmc.assign(betas.size(), std::nullopt);

  const VbFit fit = fit_vb(stats, cfg.prior, cfg.vb);
  cell.vb_converged = fit.report.converged;
  if (cell.vb_converged) {
    cell.posterior = fit.posterior;
    const auto& q = fit.posterior;
    const auto prob = [&q, alpha](int c) { return constraint_probability_gamma(q, c, alpha); };
    for (std::size_t b = 0; b < betas.size(); ++b)
      cell.c_vb[b] = try_solve(prob, cfg.staffing, betas[b], start_hint(q));
  }

  if (with_mcmc) {
    McmcConfig mc = cfg.mcmc;
    mc.seed = derive_seed(seed, kChainStream);
    const McmcChain chain = run_chain(stats, cfg.prior, mc);
    const auto prob = [&chain, alpha](int c) { return constraint_probability_samples(chain, c, alpha); };
    const int hint = start_hint(std::span<const RatePair>(chain.samples));
    for (std::size_t b = 0; b < betas.size(); ++b) cell.c_mcmc[b] = try_solve(prob, cfg.staffing, betas[b], hint);
  }
  return cell;
}

// Cells in (n, rep) order.
std::vector<Cell> run_grid(const ExperimentConfig& cfg, const std::vector<double>& betas, bool with_mcmc) {
  const std::size_t reps = cfg.replications;
  std::vector<Cell> cells(cfg.n_grid.size() * reps);
  parallel_for(cells.size(), cfg.threads, [&](std::size_t idx) {
    cells[idx] = run_cell(cfg, cfg.n_grid[idx / reps], idx % reps, betas, with_mcmc);
  });
  return cells;
}

} // namespace

ExperimentConfig default_config(Profile profile) {
  ExperimentConfig cfg;
  if (profile == Profile::Paper) {
    cfg.profile = "paper";
    cfg.replications = 250;
  }
  return cfg;
}

Profile parse_profile(const std::string& name) {
  if (name == "desk") return Profile::Desk;
  if (name == "paper") return Profile::Paper;
  throw ConfigError("unknown profile '" + name + "' (expected desk|paper)");
}

ExperimentConfig apply_config(ExperimentConfig cfg, const KeyValueConfig& kv) {
  for (const auto& [key, value] : kv.entries())
    if (!kKnownKeys.count(key)) throw ConfigError("unknown config key '" + key + "'");

  if (kv.has("profile")) cfg = default_config(parse_profile(kv.raw("profile")));
  if (kv.has("lambda0")) cfg.true_params.lambda0 = kv.get_double("lambda0");
  if (kv.has("mu0")) cfg.true_params.mu0 = kv.get_double("mu0");
  try {
    const double ls = kv.has("prior_lambda_shape") ? kv.get_double("prior_lambda_shape") : cfg.prior.prior_lambda.shape();
    const double lc = kv.has("prior_lambda_scale") ? kv.get_double("prior_lambda_scale") : cfg.prior.prior_lambda.scale();
    const double ms = kv.has("prior_mu_shape") ? kv.get_double("prior_mu_shape") : cfg.prior.prior_mu.shape();
    const double mc = kv.has("prior_mu_scale") ? kv.get_double("prior_mu_scale") : cfg.prior.prior_mu.scale();
    cfg.prior = PriorSpec{InvGammaLaw(ls, lc), InvGammaLaw(ms, mc)};
  } catch (const DomainError& e) {
    throw ConfigError(std::string("invalid prior: ") + e.what());
  }
  if (kv.has("alpha")) cfg.staffing.alpha = kv.get_double("alpha");
  if (kv.has("beta")) {
    cfg.staffing.beta = kv.get_double("beta");
    if (!kv.has("betas")) cfg.betas = {cfg.staffing.beta};
  }
  if (kv.has("betas")) cfg.betas = kv.get_double_list("betas");
  if (kv.has("c_max")) cfg.staffing.c_max = static_cast<int>(kv.get_int("c_max"));
  if (kv.has("n_grid")) {
    cfg.n_grid.clear();
    for (auto v : kv.get_int_list("n_grid")) {
      if (v < 1) throw ConfigError("n_grid entries must be positive");
      cfg.n_grid.push_back(static_cast<std::size_t>(v));
    }
  }
  if (kv.has("replications")) cfg.replications = nonnegative(kv, "replications");
  if (kv.has("mcmc")) cfg.run_mcmc = kv.get_bool("mcmc");
  if (kv.has("mcmc_total")) cfg.mcmc.total_samples = nonnegative(kv, "mcmc_total");
  if (kv.has("mcmc_burn_in")) cfg.mcmc.burn_in = nonnegative(kv, "mcmc_burn_in");
  if (kv.has("mcmc_proposal_std")) cfg.mcmc.proposal_std = kv.get_double("mcmc_proposal_std");
  if (kv.has("seed")) {
    const auto& s = kv.raw("seed");
    std::uint64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size())
      throw ConfigError("'seed' expects an unsigned 64-bit integer, got '" + s + "'");
    cfg.base_seed = Seed{v};
  }
  if (kv.has("c_probe")) cfg.c_probe = static_cast<int>(kv.get_int("c_probe"));
  if (kv.has("threads")) cfg.threads = static_cast<unsigned>(std::max<long long>(1, kv.get_int("threads")));
  if (kv.has("vb_tolerance")) cfg.vb.gradient_tolerance = kv.get_double("vb_tolerance");
  if (kv.has("vb_max_iterations")) cfg.vb.max_iterations = static_cast<int>(kv.get_int("vb_max_iterations"));
  validate(cfg);
  return cfg;
}

KeyValueConfig to_key_values(const ExperimentConfig& cfg) {
  KeyValueConfig kv;
  kv.set("profile", cfg.profile);
  kv.set("lambda0", csv::format_double(cfg.true_params.lambda0));
  kv.set("mu0", csv::format_double(cfg.true_params.mu0));
  kv.set("prior_lambda_shape", csv::format_double(cfg.prior.prior_lambda.shape()));
  kv.set("prior_lambda_scale", csv::format_double(cfg.prior.prior_lambda.scale()));
  kv.set("prior_mu_shape", csv::format_double(cfg.prior.prior_mu.shape()));
  kv.set("prior_mu_scale", csv::format_double(cfg.prior.prior_mu.scale()));
  kv.set("alpha", csv::format_double(cfg.staffing.alpha));
  kv.set("beta", csv::format_double(cfg.staffing.beta));
  kv.set("betas", list_text(cfg.betas));
  kv.set("c_max", std::to_string(cfg.staffing.c_max));
  kv.set("n_grid", list_text(cfg.n_grid));
  kv.set("replications", std::to_string(cfg.replications));
  kv.set("mcmc", cfg.run_mcmc ? "true" : "false");
  kv.set("mcmc_total", std::to_string(cfg.mcmc.total_samples));
  kv.set("mcmc_burn_in", std::to_string(cfg.mcmc.burn_in));
  kv.set("mcmc_proposal_std", csv::format_double(cfg.mcmc.proposal_std));
  kv.set("seed", std::to_string(cfg.base_seed.value));
  kv.set("c_probe", std::to_string(cfg.c_probe));
  kv.set("threads", std::to_string(cfg.threads));
  kv.set("vb_tolerance", csv::format_double(cfg.vb.gradient_tolerance));
  kv.set("vb_max_iterations", std::to_string(cfg.vb.max_iterations));
  return kv;
}

void validate(const ExperimentConfig& cfg) {
  if (!(cfg.true_params.lambda0 > 0.0) || !(cfg.true_params.mu0 > 0.0))
    throw ConfigError("lambda0 and mu0 must be positive");
  try {
    validate(cfg.staffing);
    for (double b : cfg.betas) validate(StaffingSpec{cfg.staffing.alpha, b, cfg.staffing.c_max});
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  if (cfg.betas.empty()) throw ConfigError("betas must not be empty");
  if (cfg.n_grid.empty()) throw ConfigError("n_grid must not be empty");
  for (std::size_t i = 1; i < cfg.n_grid.size(); ++i)
    if (cfg.n_grid[i] <= cfg.n_grid[i - 1]) throw ConfigError("n_grid must be strictly increasing");
  if (cfg.replications < 1) throw ConfigError("replications must be at least 1");
  if (cfg.mcmc.burn_in >= cfg.mcmc.total_samples) throw ConfigError("mcmc_burn_in must be below mcmc_total");
  if (!(cfg.mcmc.proposal_std > 0.0)) throw ConfigError("mcmc_proposal_std must be positive");
  if (!(cfg.vb.gradient_tolerance > 0.0) || cfg.vb.max_iterations < 1) throw ConfigError("invalid VB options");
  if (cfg.c_probe < 0) throw ConfigError("c_probe must be nonnegative");
}

Seed cell_seed(Seed base, std::size_t n, std::size_t rep) { return derive_seed(base, n, rep); }

double nearest_rank_quantile(std::vector<double> values, double p) {
  if (values.empty()) throw DomainError("nearest_rank_quantile: no values");
  std::sort(values.begin(), values.end());
  const auto count = static_cast<double>(values.size());
  const auto rank = static_cast<std::size_t>(std::max(1.0, std::ceil(p * count - 1e-9)));
  return values[std::min(rank, values.size()) - 1];
}

double rate_epsilon_sq(std::size_t n) {
  const double nd = static_cast<double>(n);
  return std::log(nd) / nd;
}

std::string QuantileTable::to_csv() const {
  std::string out = "n,beta,method,replications,excluded,q05,q50,q95,c_true\n";
  for (const auto& r : rows) {
    out += std::to_string(r.n) + ',' + csv::format_double(r.beta) + ',' + r.method + ',' + std::to_string(r.used) +
           ',' + std::to_string(r.excluded) + ',' + csv::format_double(r.q05) + ',' + csv::format_double(r.q50) +
           ',' + csv::format_double(r.q95) + ',' + std::to_string(c_true) + '\n';
  }
  return out;
}

std::string FeasibilityTable::to_csv() const {
  std::string out = "n,c_probe,beta,replications,excluded,included,frequency\n";
  for (const auto& r : rows) {
    out += std::to_string(r.n) + ',' + std::to_string(c_probe) + ',' + csv::format_double(beta) + ',' +
           std::to_string(r.used) + ',' + std::to_string(r.excluded) + ',' + std::to_string(r.included) + ',' +
           csv::format_double(r.frequency) + '\n';
  }
  return out;
}

std::string RateTable::to_csv() const {
  std::string out = "n,beta,replications,excluded,misstaffed,frequency,epsilon_sq,c_true,fitted_constant\n";
  for (const auto& r : rows) {
    out += std::to_string(r.n) + ',' + csv::format_double(beta) + ',' + std::to_string(r.used) + ',' +
           std::to_string(r.excluded) + ',' + std::to_string(r.misstaffed) + ',' + csv::format_double(r.frequency) +
           ',' + csv::format_double(r.epsilon_sq) + ',' + std::to_string(c_true) + ',' +
           csv::format_double(fitted_constant) + '\n';
  }
  return out;
}

QuantileTable run_consistency(const ExperimentConfig& cfg) {
  validate(cfg);
  QuantileTable table;
  table.c_true = deterministic_optimum(cfg.true_params, cfg.staffing.alpha, cfg.staffing.c_max);
  const auto cells = run_grid(cfg, cfg.betas, cfg.run_mcmc);
  const std::size_t reps = cfg.replications;

  for (std::size_t ni = 0; ni < cfg.n_grid.size(); ++ni) {
    for (std::size_t b = 0; b < cfg.betas.size(); ++b) {
      for (const bool mcmc : {false, true}) {
        if (mcmc && !cfg.run_mcmc) continue;
        std::vector<double> values;
        for (std::size_t r = 0; r < reps; ++r) {
          const auto& cell = cells[ni * reps + r];
          const auto& c = mcmc ? cell.c_mcmc[b] : cell.c_vb[b];
          if (c) values.push_back(static_cast<double>(*c));
        }
        QuantileRow row;
        row.n = cfg.n_grid[ni];
        row.beta = cfg.betas[b];
        row.method = mcmc ? "mcmc" : "vb";
        row.used = values.size();
        row.excluded = reps - values.size();
        if (!values.empty()) {
          row.q05 = nearest_rank_quantile(values, 0.05);
          row.q50 = nearest_rank_quantile(values, 0.50);
          row.q95 = nearest_rank_quantile(values, 0.95);
        } else {
          row.q05 = row.q50 = row.q95 = std::nan("");
        }
        table.rows.push_back(row);
      }
    }
  }
  return table;
}

FeasibilityTable run_feasibility_decay(const ExperimentConfig& cfg) {
  validate(cfg);
  const int c_true = deterministic_optimum(cfg.true_params, cfg.staffing.alpha, cfg.staffing.c_max);
  FeasibilityTable table;
  table.c_probe = cfg.c_probe > 0 ? cfg.c_probe : c_true - 1;
  table.beta = cfg.staffing.beta;
  if (table.c_probe < 1) throw ConfigError("c_probe must be at least 1 (C* = 1 has no infeasible probe below it)");
  const double r0 = cfg.true_params.offered_load();
  if (r0 < table.c_probe && erlang_c_delay(r0, table.c_probe) <= cfg.staffing.alpha)
    throw ConfigError("c_probe = " + std::to_string(table.c_probe) +
                      " is feasible at the true parameters; the decay test would be vacuous");

  const auto cells = run_grid(cfg, {cfg.staffing.beta}, false);
  const std::size_t reps = cfg.replications;
  for (std::size_t ni = 0; ni < cfg.n_grid.size(); ++ni) {
    FeasibilityRow row;
    row.n = cfg.n_grid[ni];
    for (std::size_t r = 0; r < reps; ++r) {
      const auto& cell = cells[ni * reps + r];
      if (!cell.posterior) {
        ++row.excluded;
        continue;
      }
      ++row.used;
      if (constraint_probability_gamma(*cell.posterior, table.c_probe, cfg.staffing.alpha) >= cfg.staffing.beta)
        ++row.included;
    }
    row.frequency = row.used ? static_cast<double>(row.included) / static_cast<double>(row.used) : 0.0;
    table.rows.push_back(row);
  }
  return table;
}

RateTable run_rate_check(const ExperimentConfig& cfg) {
  validate(cfg);
  RateTable table;
  table.c_true = deterministic_optimum(cfg.true_params, cfg.staffing.alpha, cfg.staffing.c_max);
  table.beta = cfg.staffing.beta;
  const auto cells = run_grid(cfg, {cfg.staffing.beta}, false);
  const std::size_t reps = cfg.replications;
  for (std::size_t ni = 0; ni < cfg.n_grid.size(); ++ni) {
    RateRow row;
    row.n = cfg.n_grid[ni];
    row.epsilon_sq = rate_epsilon_sq(row.n);
    for (std::size_t r = 0; r < reps; ++r) {
      const auto& c = cells[ni * reps + r].c_vb[0];
      if (!c) {
        ++row.excluded;
        continue;
      }
      ++row.used;
      if (std::abs(*c - table.c_true) >= 1) ++row.misstaffed;
    }
    row.frequency = row.used ? static_cast<double>(row.misstaffed) / static_cast<double>(row.used) : 0.0;
    table.fitted_constant = std::max(table.fitted_constant, row.frequency / row.epsilon_sq);
    table.rows.push_back(row);
  }
  return table;
}

} // namespace bjcc
