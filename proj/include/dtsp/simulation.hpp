#pragma once

// Monte-Carlo study of the MLE and MME estimators of n.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <set>
#include <span>
#include <thread>
#include <vector>

#include "dtsp/dtsp.hpp"
#include "dtsp/error.hpp"
#include "dtsp/estimation.hpp"
#include "dtsp/rng.hpp"
#include "dtsp/sampling.hpp"

namespace dtsp {

struct Criteria {
  double mean = 0.0;
  double bias = 0.0;
  double mse = 0.0;
  double variance = 0.0;
};

/// Sample summaries of replicate estimates, all normalized by 1/k:
/// mean, bias = mean(est - truth), mse = mean((est - truth)^2) and
/// variance = mean((est - mean)^2).
inline Criteria criteria(std::span<const double> estimates, double true_value) {
  if (estimates.size() < 2) throw Error(ErrorKind::InvalidConfig, "criteria: need at least 2 estimates");
  const auto k = static_cast<double>(estimates.size());
  Criteria c;
  for (double e : estimates) {
    c.mean += e;
    c.bias += e - true_value;
    c.mse += (e - true_value) * (e - true_value);
  }
  c.mean /= k;
  c.bias /= k;
  c.mse /= k;
  for (double e : estimates) c.variance += (e - c.mean) * (e - c.mean);
  c.variance /= k;
  return c;
}

/// Percentage of estimates inside mean +- 1.96 sd, where mean and sd are
/// taken from the same estimates (closed interval). This checks how normal
/// the estimator's spread looks, not classical interval coverage.
inline double ci_coverage(std::span<const double> estimates) {
  const auto c = criteria(estimates, 0.0);
  const double half = 1.96 * std::sqrt(c.variance);
  const double lo = c.mean - half;
  const double hi = c.mean + half;
  std::size_t inside = 0;
  for (double e : estimates) {
    if (e >= lo && e <= hi) ++inside;
  }
  return 100.0 * static_cast<double>(inside) / static_cast<double>(estimates.size());
}

struct StudyConfig {
  DtspParams params{-10, 0, 10, 0.5};
  std::vector<std::size_t> sample_sizes{25, 50, 100};
  std::size_t replicates = 1000;
  std::vector<Method> methods{Method::MLE, Method::MME};
  std::uint64_t master_seed = 0;
  FitOptions options{};
};

struct StudyCell {
  Method method = Method::MLE;
  std::size_t sample_size = 0;
  double mean_estimate = 0.0;
  double bias = 0.0;
  double mse = 0.0;
  double variance = 0.0;
  double ci_coverage_percent = 0.0;
  std::size_t boundary_hits = 0;
  /// Replicates whose fit raised an error; excluded from the aggregates.
  std::size_t failures = 0;

  friend bool operator==(const StudyCell&, const StudyCell&) = default;
};

struct StudyReport {
  StudyConfig config;
  std::vector<StudyCell> cells;  // method-major, then sample size, in config order
  double runtime_seconds = 0.0;
};

inline void validate(const StudyConfig& cfg) {
  validate(cfg.params);
  if (cfg.replicates < 2) throw Error(ErrorKind::InvalidConfig, "replicates must be >= 2");
  if (cfg.sample_sizes.empty()) throw Error(ErrorKind::InvalidConfig, "no sample sizes");
  if (cfg.methods.empty()) throw Error(ErrorKind::InvalidConfig, "no estimation methods");
  std::set<std::size_t> sizes;
  for (auto s : cfg.sample_sizes) {
    if (s == 0) throw Error(ErrorKind::InvalidConfig, "sample sizes must be positive");
    if (!sizes.insert(s).second) throw Error(ErrorKind::InvalidConfig, "sample sizes must be distinct");
  }
  std::set<Method> methods(cfg.methods.begin(), cfg.methods.end());
  if (methods.size() != cfg.methods.size()) throw Error(ErrorKind::InvalidConfig, "methods must be distinct");
  detail::check_options(cfg.options);
}

/// Stream for one replicate: derive_stream({method, sample size, replicate}),
/// with MLE = 0 and MME = 1. It does not depend on the position of the method
/// or size in the config, so sub-studies reproduce cells of a larger study.
inline std::uint64_t replicate_stream(Method method, std::size_t sample_size, std::size_t replicate) {
  return derive_stream({static_cast<std::uint64_t>(method), static_cast<std::uint64_t>(sample_size),
                        static_cast<std::uint64_t>(replicate)});
}

/// Runs the study on `threads` workers (0 = hardware concurrency). Each
/// replicate owns its RNG stream and its result slot, and aggregation runs in
/// replicate order afterwards, so the report does not depend on `threads`.
inline StudyReport run_study(const StudyConfig& cfg, unsigned threads = 1) {
  validate(cfg);
  const auto start = std::chrono::steady_clock::now();

  const std::size_t n_cells = cfg.methods.size() * cfg.sample_sizes.size();
  const std::size_t n_jobs = n_cells * cfg.replicates;
  constexpr double kFailed = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> estimates(n_jobs, kFailed);
  std::vector<unsigned char> at_boundary(n_jobs, 0);

  const auto run_job = [&](std::size_t job) {
    const std::size_t cell = job / cfg.replicates;
    const std::size_t rep = job % cfg.replicates;
    const Method method = cfg.methods[cell / cfg.sample_sizes.size()];
    const std::size_t size = cfg.sample_sizes[cell % cfg.sample_sizes.size()];
    RngState rng(cfg.master_seed, replicate_stream(method, size, rep));
    try {
      const auto sample = sample_many(cfg.params, size, rng);
      const auto fitted =
          fit(method, sample.values, cfg.params.a, cfg.params.m, cfg.params.b, cfg.options);
      estimates[job] = fitted.n_hat;
      at_boundary[job] =
          fitted.status == FitStatus::AtLowerBound || fitted.status == FitStatus::AtUpperBound;
    } catch (const Error&) {
      estimates[job] = kFailed;
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n_jobs));
  if (threads <= 1) {
    for (std::size_t j = 0; j < n_jobs; ++j) run_job(j);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t j = next++; j < n_jobs; j = next++) run_job(j);
      });
    }
  }

  StudyReport report;
  report.config = cfg;
  for (std::size_t cell = 0; cell < n_cells; ++cell) {
    StudyCell out;
    out.method = cfg.methods[cell / cfg.sample_sizes.size()];
    out.sample_size = cfg.sample_sizes[cell % cfg.sample_sizes.size()];
    std::vector<double> ok;
    ok.reserve(cfg.replicates);
    for (std::size_t rep = 0; rep < cfg.replicates; ++rep) {
      const std::size_t job = cell * cfg.replicates + rep;
      if (std::isnan(estimates[job])) {
        ++out.failures;
        continue;
      }
      ok.push_back(estimates[job]);
      out.boundary_hits += at_boundary[job];
    }
    if (ok.size() < 2) {
      throw Error(ErrorKind::NumericalFailure, "fewer than 2 successful fits in a study cell");
    }
    const auto c = criteria(ok, cfg.params.n);
    out.mean_estimate = c.mean;
    out.bias = c.bias;
    out.mse = c.mse;
    out.variance = c.variance;
    out.ci_coverage_percent = ci_coverage(ok);
    report.cells.push_back(out);
  }
  report.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

inline const StudyCell* find_cell(const StudyReport& r, Method method, std::size_t sample_size) {
  for (const auto& c : r.cells) {
    if (c.method == method && c.sample_size == sample_size) return &c;
  }
  return nullptr;
}

}  // namespace dtsp
