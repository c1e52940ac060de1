#include "bjcc/queue_model.hpp"

#include <cmath>
#include <string>

#include "bjcc/csv.hpp"
#include "bjcc/errors.hpp"

namespace bjcc {

namespace {

constexpr std::uint64_t kArrivalStream = 1;
constexpr std::uint64_t kServiceStream = 2;

bool positive(double v) { return std::isfinite(v) && v > 0.0; }

} // namespace

Dataset::Dataset(std::vector<double> interarrivals, std::vector<double> services)
    : interarrivals_(std::move(interarrivals)), services_(std::move(services)) {
  if (interarrivals_.empty()) throw DomainError("Dataset: at least one customer is required");
  if (interarrivals_.size() != services_.size())
    throw DomainError("Dataset: interarrival and service columns differ in length");
  for (std::size_t i = 0; i < interarrivals_.size(); ++i) {
    if (!positive(interarrivals_[i]) || !positive(services_[i]))
      throw DomainError("Dataset: row " + std::to_string(i + 1) + " has a nonpositive duration");
  }
}

SuffStats suff_stats(const Dataset& data) {
  SuffStats s;
  s.n = data.size();
  for (double t : data.interarrivals()) s.sum_interarrival += t;
  for (double t : data.services()) s.sum_service += t;
  return s;
}

void validate(const SuffStats& stats) {
  if (stats.n == 0) throw DomainError("SuffStats: n must be at least 1");
  if (!positive(stats.sum_interarrival) || !positive(stats.sum_service))
    throw DomainError("SuffStats: duration sums must be positive");
}

Dataset simulate_dataset(const TrueParams& params, std::size_t n, Seed seed) {
  if (n == 0) throw DomainError("simulate_dataset: n must be at least 1");
  if (!positive(params.lambda0) || !positive(params.mu0))
    throw DomainError("simulate_dataset: rates must be positive");
  Rng arrivals(seed, kArrivalStream);
  Rng services(seed, kServiceStream);
  std::vector<double> t(n);
  std::vector<double> s(n);
  for (auto& v : t) v = arrivals.exponential(params.lambda0);
  for (auto& v : s) v = services.exponential(params.mu0);
  return Dataset(std::move(t), std::move(s));
}

double log_likelihood(const SuffStats& stats, double lambda, double mu) {
  if (!positive(lambda) || !positive(mu)) throw DomainError("log_likelihood: rates must be positive");
  const double n = static_cast<double>(stats.n);
  return n * std::log(lambda) - lambda * stats.sum_interarrival + n * std::log(mu) - mu * stats.sum_service;
}

void write_dataset_csv(const Dataset& data, const std::filesystem::path& path) {
  std::string out = "interarrival,service\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    out += csv::format_double(data.interarrivals()[i]);
    out += ',';
    out += csv::format_double(data.services()[i]);
    out += '\n';
  }
  csv::write_text(path, out);
}

Dataset read_dataset_csv(const std::filesystem::path& path) {
  const auto rows = csv::read_table(path, {"interarrival", "service"});
  std::vector<double> t;
  std::vector<double> s;
  t.reserve(rows.size());
  s.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double ti = csv::parse_double(rows[i][0]);
    const double si = csv::parse_double(rows[i][1]);
    if (!positive(ti) || !positive(si))
      throw ConfigError(path.string() + ": row " + std::to_string(i + 1) + " has a nonpositive duration");
    t.push_back(ti);
    s.push_back(si);
  }
  if (t.empty()) throw ConfigError(path.string() + ": no data rows");
  return Dataset(std::move(t), std::move(s));
}

} // namespace bjcc
