#pragma once

// Continuous two-sided power distribution TSP(a, m, b, n) on [a, b].
//
// The discrete distribution is the floor of this variable, so its survival
// function at integers is exactly the expression used here.

#include <cmath>
#include <string>

#include "dtsp/error.hpp"

namespace dtsp {

struct TspParams {
  double a = 0.0;
  double m = 0.0;
  double b = 1.0;
  double n = 1.0;
};

inline void validate(const TspParams& p) {
  if (!std::isfinite(p.a) || !std::isfinite(p.m) || !std::isfinite(p.b) || !std::isfinite(p.n)) {
    throw Error(ErrorKind::InvalidParameter, "TSP parameters must be finite");
  }
  if (!(p.a < p.b)) throw Error(ErrorKind::EmptySupport, "TSP requires a < b");
  if (p.m < p.a || p.m > p.b) throw Error(ErrorKind::ThresholdOutOfRange, "TSP requires a <= m <= b");
  if (!(p.n > 0.0)) throw Error(ErrorKind::NonPositiveShape, "TSP requires n > 0");
}

namespace detail {

// Left-branch mass below x, valid for a <= x <= m with m > a.
inline double tsp_lower_mass(const TspParams& p, double x) {
  if (x <= p.a) return 0.0;
  return (p.m - p.a) / (p.b - p.a) * std::pow((x - p.a) / (p.m - p.a), p.n);
}

// Right-branch mass above x, valid for m <= x <= b with b > m.
inline double tsp_upper_mass(const TspParams& p, double x) {
  if (x >= p.b) return 0.0;
  return (p.b - p.m) / (p.b - p.a) * std::pow((p.b - x) / (p.b - p.m), p.n);
}

}  // namespace detail

inline double tsp_pdf(const TspParams& p, double x) {
  validate(p);
  if (!(x >= p.a && x <= p.b)) throw Error(ErrorKind::DomainError, "tsp_pdf: x outside [a, b]");
  const double peak = p.n / (p.b - p.a);
  if (x == p.m) return peak;
  if (x < p.m) return peak * std::pow((x - p.a) / (p.m - p.a), p.n - 1.0);
  return peak * std::pow((p.b - x) / (p.b - p.m), p.n - 1.0);
}

/// P(X <= x). For x >= m this is 1 - (upper tail), so the tail itself stays exact.
inline double tsp_cdf(const TspParams& p, double x) {
  validate(p);
  if (x <= p.a) return 0.0;
  if (x >= p.b) return 1.0;
  if (x < p.m) return detail::tsp_lower_mass(p, x);
  if (x == p.m) return (p.m - p.a) / (p.b - p.a);
  return 1.0 - detail::tsp_upper_mass(p, x);
}

/// P(X >= x). The right branch is evaluated directly, which makes
/// S(m) = (b - m)/(b - a) hold bit-exactly.
inline double tsp_survival(const TspParams& p, double x) {
  validate(p);
  if (x <= p.a) return 1.0;
  if (x >= p.b) return 0.0;
  if (x < p.m) return 1.0 - detail::tsp_lower_mass(p, x);
  return detail::tsp_upper_mass(p, x);
}

/// Closed-form inverse of tsp_cdf. At the threshold u = (m-a)/(b-a) the
/// left branch is used; both give m.
inline double tsp_quantile(const TspParams& p, double u) {
  validate(p);
  if (!(u >= 0.0 && u <= 1.0)) throw Error(ErrorKind::DomainError, "tsp_quantile: u outside [0, 1]");
  if (u == 1.0) return p.b;
  const double width = p.b - p.a;
  const double split = (p.m - p.a) / width;
  if (p.m > p.a && u <= split) {
    return p.a + (p.m - p.a) * std::pow(u * width / (p.m - p.a), 1.0 / p.n);
  }
  return p.b - (p.b - p.m) * std::pow((1.0 - u) * width / (p.b - p.m), 1.0 / p.n);
}

inline double tsp_mean(const TspParams& p) {
  validate(p);
  return (p.a + (p.n - 1.0) * p.m + p.b) / (p.n + 1.0);
}

inline double tsp_variance(const TspParams& p) {
  validate(p);
  const double width = p.b - p.a;
  const double left = (p.m - p.a) / width;
  const double right = (p.b - p.m) / width;
  return width * width * (p.n - 2.0 * (p.n - 1.0) * left * right) /
         ((p.n + 2.0) * (p.n + 1.0) * (p.n + 1.0));
}

}  // namespace dtsp
