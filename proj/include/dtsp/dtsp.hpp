#pragma once

// Discrete two-sided power distribution DTSP(a, m, b, n).
//
// Support is {a, ..., b-1}. Points a..m-1 form the left branch and m..b-1 the
// right branch; either branch may be empty (m == a or m == b). The pmf is the
// floor image of TSP(a, m, b, n), i.e. p(y) = S_X(y) - S_X(y+1).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dtsp/error.hpp"
#include "dtsp/tsp_continuous.hpp"

namespace dtsp {

struct DtspParams {
  std::int64_t a = 0;
  std::int64_t m = 0;
  std::int64_t b = 1;
  double n = 1.0;

  friend bool operator==(const DtspParams&, const DtspParams&) = default;
};

inline DtspParams validate(const DtspParams& p) {
  if (p.b <= p.a) {
    throw Error(ErrorKind::EmptySupport, "need a < b (got a=" + std::to_string(p.a) +
                                             ", b=" + std::to_string(p.b) + ")");
  }
  if (p.m < p.a || p.m > p.b) {
    throw Error(ErrorKind::ThresholdOutOfRange, "need a <= m <= b (got m=" + std::to_string(p.m) + ")");
  }
  if (!(p.n > 0.0) || !std::isfinite(p.n)) {
    throw Error(ErrorKind::NonPositiveShape, "need finite n > 0");
  }
  return p;
}

/// Builds params from real-valued inputs (CLI, JSON), rejecting fractional endpoints.
inline DtspParams make_params(double a, double m, double b, double n) {
  const auto as_int = [](double v, const char* name) {
    if (!std::isfinite(v) || v != std::floor(v) || std::fabs(v) > 9.0e15) {
      throw Error(ErrorKind::NonIntegerEndpoint, std::string(name) + " must be an integer");
    }
    return static_cast<std::int64_t>(v);
  };
  return validate(DtspParams{as_int(a, "a"), as_int(m, "m"), as_int(b, "b"), n});
}

inline TspParams continuous_parent(const DtspParams& p) {
  return TspParams{static_cast<double>(p.a), static_cast<double>(p.m), static_cast<double>(p.b), p.n};
}

inline bool in_support(const DtspParams& p, std::int64_t y) { return y >= p.a && y < p.b; }

namespace detail {

// Naive subtraction is exact enough for small offsets; beyond that the
// difference is formed as hi^n * (1 - (c/(c+1))^n) via expm1.
inline constexpr std::int64_t kNaiveStepLimit = 8;

// ((c+1)/L)^n - (c/L)^n for integer c >= 0 and branch length L >= 1.
inline double scaled_power_step(std::int64_t c, std::int64_t len, double n) {
  const double hi = std::pow(static_cast<double>(c + 1) / static_cast<double>(len), n);
  if (c == 0) return hi;
  if (c <= kNaiveStepLimit) {
    return hi - std::pow(static_cast<double>(c) / static_cast<double>(len), n);
  }
  return hi * -std::expm1(n * std::log1p(-1.0 / static_cast<double>(c + 1)));
}

// log(((c+1)/L)^n - (c/L)^n).
inline double log_scaled_power_step(std::int64_t c, std::int64_t len, double n) {
  const double log_hi = n * std::log(static_cast<double>(c + 1) / static_cast<double>(len));
  if (c == 0) return log_hi;
  return log_hi + std::log(-std::expm1(n * std::log1p(-1.0 / static_cast<double>(c + 1))));
}

// Offset c and branch length L of y within its branch, such that
// p(y) = L/(b-a) * scaled_power_step(c, L, n).
struct BranchPosition {
  std::int64_t offset;
  std::int64_t length;
  bool left;
};

inline BranchPosition branch_position(const DtspParams& p, std::int64_t y) {
  if (y < p.m) return {y - p.a, p.m - p.a, true};
  return {p.b - y - 1, p.b - p.m, false};
}

inline double pmf_unchecked(const DtspParams& p, std::int64_t y) {
  const auto pos = branch_position(p, y);
  return static_cast<double>(pos.length) / static_cast<double>(p.b - p.a) *
         scaled_power_step(pos.offset, pos.length, p.n);
}

// sum_{k=1}^{count} (k/scale)^power; equals H_count^(-power) / scale^power
// without forming scale^power.
inline double scaled_power_sum(std::int64_t count, double power, std::int64_t scale) {
  double sum = 0.0;
  for (std::int64_t k = 1; k <= count; ++k) {
    sum += std::pow(static_cast<double>(k) / static_cast<double>(scale), power);
  }
  return sum;
}

}  // namespace detail

/// Probability mass at y; zero outside the support.
inline double pmf(const DtspParams& p, std::int64_t y) {
  validate(p);
  if (!in_support(p, y)) return 0.0;
  return detail::pmf_unchecked(p, y);
}

inline double log_pmf(const DtspParams& p, std::int64_t y) {
  validate(p);
  if (!in_support(p, y)) {
    throw Error(ErrorKind::OutOfSupport, "log_pmf: y=" + std::to_string(y) + " outside support");
  }
  const auto pos = detail::branch_position(p, y);
  return std::log(static_cast<double>(pos.length) / static_cast<double>(p.b - p.a)) +
         detail::log_scaled_power_step(pos.offset, pos.length, p.n);
}

/// p(y+1)/p(y) for y and y+1 in the same branch.
inline double pmf_ratio(const DtspParams& p, std::int64_t y) {
  validate(p);
  if (!in_support(p, y) || !in_support(p, y + 1)) {
    throw Error(ErrorKind::OutOfSupport, "pmf_ratio: y and y+1 must both lie in the support");
  }
  if (y == p.m - 1) {
    throw Error(ErrorKind::BranchCrossing, "pmf_ratio: y = m-1 crosses from left to right branch");
  }
  if (y < p.m) {
    const std::int64_t c = y - p.a;
    const std::int64_t len = p.m - p.a;
    return detail::scaled_power_step(c + 1, len, p.n) / detail::scaled_power_step(c, len, p.n);
  }
  const std::int64_t c = p.b - y - 1;
  const std::int64_t len = p.b - p.m;
  return detail::scaled_power_step(c - 1, len, p.n) / detail::scaled_power_step(c, len, p.n);
}

/// (y, p(y)) over the whole support. Each branch starts from a direct
/// evaluation and is extended with pmf_ratio.
inline std::vector<std::pair<std::int64_t, double>> pmf_table(const DtspParams& p) {
  validate(p);
  std::vector<std::pair<std::int64_t, double>> table;
  table.reserve(static_cast<std::size_t>(p.b - p.a));
  for (std::int64_t y = p.a; y < p.b; ++y) {
    double prob;
    if (y == p.a || y == p.m) {
      prob = detail::pmf_unchecked(p, y);
    } else {
      prob = table.back().second * pmf_ratio(p, y - 1);
    }
    table.emplace_back(y, prob);
  }
  return table;
}

/// P(Y >= y).
inline double survival(const DtspParams& p, std::int64_t y) {
  validate(p);
  if (y <= p.a) return 1.0;
  if (y >= p.b) return 0.0;
  return tsp_survival(continuous_parent(p), static_cast<double>(y));
}

/// P(Y <= y), computed as 1 - S(y+1).
inline double cdf(const DtspParams& p, std::int64_t y) {
  validate(p);
  if (y < p.a) return 0.0;
  if (y >= p.b - 1) return 1.0;
  return 1.0 - survival(p, y + 1);
}

/// r(y) = p(y) / S(y). On the right branch this is 1 - ((b-y-1)/(b-y))^n.
/// r(b-1) = 1 exactly.
inline double hazard(const DtspParams& p, std::int64_t y) {
  validate(p);
  if (!in_support(p, y)) {
    throw Error(ErrorKind::OutOfSupport, "hazard: y=" + std::to_string(y) + " outside support");
  }
  if (y == p.b - 1) return 1.0;
  if (y >= p.m) {
    return -std::expm1(p.n * std::log1p(-1.0 / static_cast<double>(p.b - y)));
  }
  return detail::pmf_unchecked(p, y) / survival(p, y);
}

/// All argmax points of the pmf, ascending. Points within 1e-12 relative of
/// the maximum count as ties.
inline std::vector<std::int64_t> mode_set(const DtspParams& p) {
  const auto table = pmf_table(p);
  double best = 0.0;
  for (const auto& [y, prob] : table) best = std::max(best, prob);
  std::vector<std::int64_t> modes;
  for (const auto& [y, prob] : table) {
    if (prob >= best * (1.0 - 1e-12)) modes.push_back(y);
  }
  return modes;
}

/// Smallest support point with cdf(y) >= q. The comparison allows a few ulps
/// so that q = (m-a)/(b-a) lands on m-1 even when 1 - (b-m)/(b-a) rounds low.
inline std::int64_t quantile(const DtspParams& p, double q) {
  validate(p);
  if (!(q > 0.0 && q <= 1.0)) throw Error(ErrorKind::DomainError, "quantile: q outside (0, 1]");
  const double target = q - 4.0 * std::numeric_limits<double>::epsilon();
  for (std::int64_t y = p.a; y < p.b - 1; ++y) {
    if (cdf(p, y) >= target) return y;
  }
  return p.b - 1;
}

inline std::int64_t median(const DtspParams& p) { return quantile(p, 0.5); }

/// H_count^(order) = sum_{k=1}^{count} k^(-order).
inline double generalized_harmonic(std::int64_t count, double order) {
  double sum = 0.0;
  for (std::int64_t k = 1; k <= count; ++k) sum += std::pow(static_cast<double>(k), -order);
  return sum;
}

struct MomentSummary {
  double mean = 0.0;
  double second_moment = 0.0;
  double variance = 0.0;
  // Empty when the mean is zero.
  std::optional<double> index_of_dispersion;
};

namespace detail {

inline MomentSummary assemble(double mean, double second_moment, double variance) {
  MomentSummary s{mean, second_moment, variance, std::nullopt};
  if (mean != 0.0) s.index_of_dispersion = variance / mean;
  return s;
}

}  // namespace detail

/// Moments by direct summation over the pmf. Reference for the closed forms.
inline MomentSummary moments_by_summation(const DtspParams& p) {
  const auto table = pmf_table(p);
  double mean = 0.0;
  double second = 0.0;
  for (const auto& [y, prob] : table) {
    const auto yd = static_cast<double>(y);
    mean += yd * prob;
    second += yd * yd * prob;
  }
  double variance = 0.0;
  for (const auto& [y, prob] : table) {
    const double d = static_cast<double>(y) - mean;
    variance += d * d * prob;
  }
  return detail::assemble(mean, second, variance);
}

/// E(Y) in compact form:
///   [(m-1)(m-a)^n - H_{m-a-1}^(-n)] / ((b-a)(m-a)^(n-1))
/// + [m(b-m)^n + H_{b-m-1}^(-n)] / ((b-a)(b-m)^(n-1)).
/// Each branch is rescaled by its length^n; empty branches contribute 0.
inline double mean_closed_form(const DtspParams& p) {
  validate(p);
  const auto width = static_cast<double>(p.b - p.a);
  const auto m = static_cast<double>(p.m);
  double mean = 0.0;
  if (p.m > p.a) {
    const std::int64_t len = p.m - p.a;
    mean += static_cast<double>(len) / width * ((m - 1.0) - detail::scaled_power_sum(len - 1, p.n, len));
  }
  if (p.b > p.m) {
    const std::int64_t len = p.b - p.m;
    mean += static_cast<double>(len) / width * (m + detail::scaled_power_sum(len - 1, p.n, len));
  }
  return mean;
}

/// E(Y^2) in compact form:
///   [(m-1)^2 (m-a)^n - (2a-1) H^(-n) - 2 H^(-n-1)] / ((b-a)(m-a)^(n-1))     over m-a-1 terms
/// + [m^2 (b-m)^n + (2b-1) H^(-n) - 2 H^(-n-1)] / ((b-a)(b-m)^(n-1))        over b-m-1 terms
inline double second_moment_closed_form(const DtspParams& p) {
  validate(p);
  const auto width = static_cast<double>(p.b - p.a);
  const auto a = static_cast<double>(p.a);
  const auto b = static_cast<double>(p.b);
  const auto m = static_cast<double>(p.m);
  double second = 0.0;
  if (p.m > p.a) {
    const std::int64_t len = p.m - p.a;
    const auto lend = static_cast<double>(len);
    const double h_n = detail::scaled_power_sum(len - 1, p.n, len);
    const double h_n1 = lend * detail::scaled_power_sum(len - 1, p.n + 1.0, len);
    second += lend / width * ((m - 1.0) * (m - 1.0) - (2.0 * a - 1.0) * h_n - 2.0 * h_n1);
  }
  if (p.b > p.m) {
    const std::int64_t len = p.b - p.m;
    const auto lend = static_cast<double>(len);
    const double h_n = detail::scaled_power_sum(len - 1, p.n, len);
    const double h_n1 = lend * detail::scaled_power_sum(len - 1, p.n + 1.0, len);
    second += lend / width * (m * m + (2.0 * b - 1.0) * h_n - 2.0 * h_n1);
  }
  return second;
}

inline MomentSummary moments(const DtspParams& p) {
  const double mean = mean_closed_form(p);
  const double second = second_moment_closed_form(p);
  return detail::assemble(mean, second, std::max(0.0, second - mean * mean));
}

/// Mirror image on the same support: pmf_reflect(a+b-1-y) == pmf(y).
inline DtspParams reflect(const DtspParams& p) {
  validate(p);
  return DtspParams{p.a, p.a + p.b - p.m, p.b, p.n};
}

/// Floor-map bounds relating DTSP moments to the continuous parent:
/// E(X) - 1 < E(Y) < E(X) and Var(X) < Var(Y) <= Var(X) + 1/4.
/// The variance bound leans on an independence assumption that does not hold
/// in general, so it is reported rather than enforced.
struct DiscretizationBounds {
  double continuous_mean = 0.0;
  double continuous_variance = 0.0;
  double discrete_mean = 0.0;
  double discrete_variance = 0.0;
  bool mean_within = false;
  bool variance_within = false;
};

inline DiscretizationBounds discretization_bounds(const DtspParams& p) {
  const auto parent = continuous_parent(validate(p));
  const auto mom = moments(p);
  DiscretizationBounds out;
  out.continuous_mean = tsp_mean(parent);
  out.continuous_variance = tsp_variance(parent);
  out.discrete_mean = mom.mean;
  out.discrete_variance = mom.variance;
  out.mean_within = out.continuous_mean - 1.0 < mom.mean && mom.mean < out.continuous_mean;
  out.variance_within =
      out.continuous_variance < mom.variance && mom.variance <= out.continuous_variance + 0.25;
  return out;
}

}  // namespace dtsp
