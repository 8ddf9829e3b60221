#pragma once

// Estimation of the shape n of DTSP(a, m, b, n) with (a, m, b) known.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/math/tools/toms748_solve.hpp>

#include "dtsp/dtsp.hpp"
#include "dtsp/error.hpp"
#include "dtsp/sampling.hpp"

namespace dtsp {

enum class Method { MLE, MME };
enum class FitStatus { Converged, AtLowerBound, AtUpperBound, DegenerateMoment };

constexpr std::string_view to_string(Method m) noexcept { return m == Method::MLE ? "MLE" : "MME"; }

constexpr std::string_view to_string(FitStatus s) noexcept {
  switch (s) {
    case FitStatus::Converged: return "Converged";
    case FitStatus::AtLowerBound: return "AtLowerBound";
    case FitStatus::AtUpperBound: return "AtUpperBound";
    case FitStatus::DegenerateMoment: return "DegenerateMoment";
  }
  return "Unknown";
}

struct FitOptions {
  double n_lo = 1e-3;
  double n_hi = 50.0;
  /// Required final bracket width on n for status Converged.
  double tolerance = 1e-8;
  std::uintmax_t max_iterations = 200;
};

struct EstimationResult {
  double n_hat = 0.0;
  Method method = Method::MLE;
  FitStatus status = FitStatus::Converged;
  /// Log-likelihood (MLE) or squared moment distance (MME) at n_hat.
  double objective = 0.0;
  std::uintmax_t iterations = 0;
  /// 1 or 2 for MME, empty for MLE.
  std::optional<int> moment_order_used;
};

struct Endpoints {
  std::int64_t a = 0;
  std::int64_t m = 0;
  std::int64_t b = 1;

  friend bool operator==(const Endpoints&, const Endpoints&) = default;
};

namespace detail {

inline void check_data(std::span<const std::int64_t> data, const DtspParams& p) {
  validate(p);
  if (data.empty()) throw Error(ErrorKind::EmptyData, "no observations");
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!in_support(p, data[i])) {
      throw Error(ErrorKind::DataOutOfSupport, "observation " + std::to_string(i) + " (value " +
                                                   std::to_string(data[i]) + ") outside {" +
                                                   std::to_string(p.a) + ",...," +
                                                   std::to_string(p.b - 1) + "}");
    }
  }
}

// Observation counts per support point, index y - a.
inline std::vector<std::size_t> support_counts(std::span<const std::int64_t> data, const DtspParams& p) {
  check_data(data, p);
  std::vector<std::size_t> counts(static_cast<std::size_t>(p.b - p.a), 0);
  for (auto y : data) ++counts[static_cast<std::size_t>(y - p.a)];
  return counts;
}

inline void check_options(const FitOptions& opt) {
  if (!(opt.n_lo > 0.0) || !(opt.n_hi > opt.n_lo) || !std::isfinite(opt.n_hi) ||
      !(opt.tolerance > 0.0)) {
    throw Error(ErrorKind::InvalidInterval, "search interval must satisfy 0 < n_lo < n_hi < inf");
  }
}

// d/dn log(((c+1)/L)^n - (c/L)^n), with 0 * log 0 = 0.
inline double dlog_scaled_power_step(std::int64_t c, std::int64_t len, double n) {
  const double base = std::log(static_cast<double>(c + 1)) - std::log(static_cast<double>(len));
  if (c == 0) return base;
  const double log_ratio = std::log1p(-1.0 / static_cast<double>(c + 1));  // log(c/(c+1)) < 0
  const double t = n * log_ratio;
  return base + std::exp(t) * -log_ratio / -std::expm1(t);
}

inline double log_likelihood_counts(const std::vector<std::size_t>& counts, const DtspParams& p) {
  double ll = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] == 0) continue;
    ll += static_cast<double>(counts[i]) * log_pmf(p, p.a + static_cast<std::int64_t>(i));
  }
  return ll;
}

inline double score_counts(const std::vector<std::size_t>& counts, const DtspParams& p) {
  double s = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] == 0) continue;
    const auto pos = branch_position(p, p.a + static_cast<std::int64_t>(i));
    s += static_cast<double>(counts[i]) * dlog_scaled_power_step(pos.offset, pos.length, p.n);
  }
  return s;
}

struct RootResult {
  double x;
  std::uintmax_t iterations;
  bool within_tolerance;
};

// Root of f on [lo, hi] given f(lo) and f(hi) of opposite sign (or zero).
template <class F>
RootResult bracketed_root(F&& f, double lo, double hi, double f_lo, double f_hi, const FitOptions& opt) {
  if (f_lo == 0.0) return {lo, 0, true};
  if (f_hi == 0.0) return {hi, 0, true};
  std::uintmax_t iters = opt.max_iterations;
  const auto [left, right] = boost::math::tools::toms748_solve(
      f, lo, hi, f_lo, f_hi, boost::math::tools::eps_tolerance<double>(50), iters);
  const bool ok = (right - left) <= opt.tolerance;
  if (!ok && iters >= opt.max_iterations) {
    throw Error(ErrorKind::NumericalFailure, "root bracket did not shrink below tolerance within " +
                                                 std::to_string(opt.max_iterations) + " iterations");
  }
  return {0.5 * (left + right), iters, ok};
}

}  // namespace detail

inline double log_likelihood(std::span<const std::int64_t> data, std::int64_t a, std::int64_t m,
                             std::int64_t b, double n) {
  const DtspParams p{a, m, b, n};
  return detail::log_likelihood_counts(detail::support_counts(data, p), p);
}

/// d/dn of log_likelihood.
inline double score(std::span<const std::int64_t> data, std::int64_t a, std::int64_t m, std::int64_t b,
                    double n) {
  const DtspParams p{a, m, b, n};
  return detail::score_counts(detail::support_counts(data, p), p);
}

/// Maximum likelihood estimate of n on [n_lo, n_hi].
///
/// Every per-observation term log(((c+1)/L)^n - (c/L)^n) is concave in n, so
/// the score is non-increasing and has at most one sign change. Without one,
/// the maximizer is the interval end the score points to.
inline EstimationResult fit_mle(std::span<const std::int64_t> data, std::int64_t a, std::int64_t m,
                                std::int64_t b, const FitOptions& opt = {}) {
  detail::check_options(opt);
  const auto counts = detail::support_counts(data, DtspParams{a, m, b, 1.0});
  const auto score_at = [&](double n) { return detail::score_counts(counts, DtspParams{a, m, b, n}); };
  const auto ll_at = [&](double n) { return detail::log_likelihood_counts(counts, DtspParams{a, m, b, n}); };

  EstimationResult r;
  r.method = Method::MLE;
  const double s_lo = score_at(opt.n_lo);
  const double s_hi = score_at(opt.n_hi);
  if (s_lo <= 0.0) {
    r.n_hat = opt.n_lo;
    r.status = s_lo == 0.0 ? FitStatus::Converged : FitStatus::AtLowerBound;
  } else if (s_hi >= 0.0) {
    r.n_hat = opt.n_hi;
    r.status = s_hi == 0.0 ? FitStatus::Converged : FitStatus::AtUpperBound;
  } else {
    const auto root = detail::bracketed_root(score_at, opt.n_lo, opt.n_hi, s_lo, s_hi, opt);
    r.n_hat = root.x;
    r.iterations = root.iterations;
    r.status = FitStatus::Converged;
  }
  r.objective = ll_at(r.n_hat);
  return r;
}

inline EstimationResult fit_mle(const Sample& s, std::int64_t a, std::int64_t m, std::int64_t b,
                                const FitOptions& opt = {}) {
  return fit_mle(std::span<const std::int64_t>(s.values), a, m, b, opt);
}

/// Method-of-moments estimate of n.
///
/// Solves E(Y; n) = sample mean. When E(Y; n) is flat across the search
/// interval (range below 1e-9, the case m = (a+b)/2) the raw second moment is
/// matched instead. Without a sign change the interval end with the smaller
/// squared distance is returned. If the second moment is flat as well, nothing
/// identifies n and the result is DegenerateMoment at n = 1 (clamped).
inline EstimationResult fit_mme(std::span<const std::int64_t> data, std::int64_t a, std::int64_t m,
                                std::int64_t b, const FitOptions& opt = {}) {
  detail::check_options(opt);
  detail::check_data(data, DtspParams{a, m, b, 1.0});

  double m1 = 0.0;
  double m2 = 0.0;
  for (auto y : data) {
    const auto yd = static_cast<double>(y);
    m1 += yd;
    m2 += yd * yd;
  }
  m1 /= static_cast<double>(data.size());
  m2 /= static_cast<double>(data.size());

  constexpr int kProbePoints = 65;
  constexpr double kFlatRange = 1e-9;
  const auto is_flat = [&](auto&& moment) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    const double step = std::log(opt.n_hi / opt.n_lo) / (kProbePoints - 1);
    for (int i = 0; i < kProbePoints; ++i) {
      const double n = i + 1 == kProbePoints ? opt.n_hi : opt.n_lo * std::exp(step * i);
      const double v = moment(n);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    return hi - lo < kFlatRange;
  };

  const auto first = [&](double n) { return mean_closed_form(DtspParams{a, m, b, n}); };
  const auto second = [&](double n) { return second_moment_closed_form(DtspParams{a, m, b, n}); };

  EstimationResult r;
  r.method = Method::MME;

  const auto solve = [&](auto&& moment, double target, int order) {
    r.moment_order_used = order;
    const auto f = [&](double n) { return moment(n) - target; };
    const double f_lo = f(opt.n_lo);
    const double f_hi = f(opt.n_hi);
    if ((f_lo <= 0.0 && f_hi >= 0.0) || (f_lo >= 0.0 && f_hi <= 0.0)) {
      const auto root = detail::bracketed_root(f, opt.n_lo, opt.n_hi, f_lo, f_hi, opt);
      r.n_hat = root.x;
      r.iterations = root.iterations;
      r.status = FitStatus::Converged;
    } else if (std::fabs(f_lo) <= std::fabs(f_hi)) {
      r.n_hat = opt.n_lo;
      r.status = FitStatus::AtLowerBound;
    } else {
      r.n_hat = opt.n_hi;
      r.status = FitStatus::AtUpperBound;
    }
    const double d = f(r.n_hat);
    r.objective = d * d;
  };

  if (!is_flat(first)) {
    solve(first, m1, 1);
  } else if (!is_flat(second)) {
    solve(second, m2, 2);
  } else {
    r.moment_order_used = 2;
    r.n_hat = std::clamp(1.0, opt.n_lo, opt.n_hi);
    r.status = FitStatus::DegenerateMoment;
    const double d = second(r.n_hat) - m2;
    r.objective = d * d;
  }
  return r;
}

inline EstimationResult fit_mme(const Sample& s, std::int64_t a, std::int64_t m, std::int64_t b,
                                const FitOptions& opt = {}) {
  return fit_mme(std::span<const std::int64_t>(s.values), a, m, b, opt);
}

inline EstimationResult fit(Method method, std::span<const std::int64_t> data, std::int64_t a,
                            std::int64_t m, std::int64_t b, const FitOptions& opt = {}) {
  return method == Method::MLE ? fit_mle(data, a, m, b, opt) : fit_mme(data, a, m, b, opt);
}

/// Advisory (a, m, b) from data: a = min, b = max + 1, m = smallest
/// most-frequent value.
inline Endpoints endpoints_heuristic(std::span<const std::int64_t> data) {
  if (data.empty()) throw Error(ErrorKind::EmptyData, "no observations");
  std::map<std::int64_t, std::size_t> freq;
  for (auto y : data) ++freq[y];
  std::int64_t mode = freq.begin()->first;
  std::size_t best = 0;
  for (const auto& [y, c] : freq) {
    if (c > best) {
      best = c;
      mode = y;
    }
  }
  return Endpoints{freq.begin()->first, mode, freq.rbegin()->first + 1};
}

/// Reads observations: one integer per line, optionally preceded by the
/// single CSV header line "y". Blank lines are skipped.
inline std::vector<std::int64_t> read_observations(std::istream& in) {
  std::vector<std::int64_t> values;
  std::string line;
  std::size_t line_no = 0;
  bool seen_content = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view v(line);
    while (!v.empty() && (v.front() == ' ' || v.front() == '\t')) v.remove_prefix(1);
    while (!v.empty() && (v.back() == ' ' || v.back() == '\t' || v.back() == '\r')) v.remove_suffix(1);
    if (v.empty()) continue;
    if (!seen_content && v == "y") {
      seen_content = true;
      continue;
    }
    seen_content = true;
    std::int64_t value = 0;
    const char* last = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), last, value);
    if (ec != std::errc{} || ptr != last) {
      throw Error(ErrorKind::ParseError,
                  "line " + std::to_string(line_no) + ": not an integer: '" + std::string(v) + "'");
    }
    values.push_back(value);
  }
  return values;
}

}  // namespace dtsp
