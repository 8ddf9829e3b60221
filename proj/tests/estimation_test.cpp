#include "dtsp/estimation.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "dtsp/dtsp.hpp"
#include "dtsp/sampling.hpp"
#include "oracles.hpp"

namespace dtsp {
namespace {

using Data = std::vector<std::int64_t>;

const Data kFlat{0, 1, 2, 3};
const Data kCentre{1, 1, 2, 2};

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::InvalidParameter;
}

struct Fixture {
  DtspParams truth;
  std::size_t size;
  std::uint64_t seed;
};

std::vector<Fixture> fixtures() {
  return {
      {{0, 2, 4, 2.0}, 30, 1},      {{-10, 0, 10, 0.5}, 100, 2}, {{-10, 0, 10, 3.5}, 100, 3},
      {{0, 3, 17, 0.8}, 60, 4},     {{0, 0, 12, 2.5}, 40, 5},    {{-5, 5, 5, 1.7}, 25, 6},
      {{0, 1, 50, 6.0}, 200, 7},    {{-3, 4, 9, 0.2}, 80, 8},    {{0, 6, 7, 1.0}, 50, 9},
  };
}

Data draw(const Fixture& f) {
  RngState rng(f.seed);
  return sample_many(f.truth, f.size, rng).values;
}

TEST(LogLikelihood, Examples) {
  EXPECT_NEAR(log_likelihood(Data{1}, 0, 2, 4, 2.0), std::log(3.0 / 8.0), 1e-15);
  EXPECT_NEAR(log_likelihood(kFlat, 0, 2, 4, 2.0), std::log(1.0 / 8 * 3.0 / 8 * 3.0 / 8 * 1.0 / 8), 1e-14);
  for (const auto& f : fixtures()) {
    const auto d = draw(f);
    const auto& p = f.truth;
    EXPECT_NEAR(log_likelihood(d, p.a, p.m, p.b, 1.0), -static_cast<double>(d.size()) * std::log(double(p.b - p.a)),
                1e-12 * d.size());
  }
}

TEST(LogLikelihood, EqualsSumOfLogPmfOracle) {
  for (const auto& f : fixtures()) {
    const auto d = draw(f);
    const auto& p = f.truth;
    const oracle::Grid g{p.a, p.m, p.b, 1.9};
    long double expected = 0;
    for (auto y : d) expected += std::log(oracle::pmf_formula(g, y));
    EXPECT_NEAR(log_likelihood(d, p.a, p.m, p.b, 1.9), static_cast<double>(expected), 1e-11 * d.size());
  }
}

TEST(LogLikelihood, Errors) {
  EXPECT_EQ(kind_of([] { log_likelihood(Data{4}, 0, 2, 4, 2.0); }), ErrorKind::DataOutOfSupport);
  EXPECT_EQ(kind_of([] { log_likelihood(Data{-1}, 0, 2, 4, 2.0); }), ErrorKind::DataOutOfSupport);
  EXPECT_EQ(kind_of([] { score(Data{7}, 0, 2, 4, 2.0); }), ErrorKind::DataOutOfSupport);
  EXPECT_EQ(kind_of([] { log_likelihood(Data{1}, 0, 5, 4, 2.0); }), ErrorKind::ThresholdOutOfRange);
}

TEST(Score, Examples) {
  EXPECT_NEAR(score(kFlat, 0, 2, 4, 1.0), 0.0, 1e-14);
  EXPECT_LT(score(kFlat, 0, 2, 4, 2.0), 0.0);
  for (double n : {1e-3, 0.1, 1.0, 5.0, 50.0}) EXPECT_GT(score(kCentre, 0, 2, 4, n), 0.0) << n;
}

TEST(Score, MatchesCentralDifference) {
  int checked = 0;
  for (const auto& f : fixtures()) {
    const auto d = draw(f);
    const auto& p = f.truth;
    const auto ll = [&](double n) { return log_likelihood(d, p.a, p.m, p.b, n); };
    for (double n : {0.05, 0.3, 0.9, 1.5, 3.0, 7.0, 20.0}) {
      const double s = score(d, p.a, p.m, p.b, n);
      // Richardson-extrapolated central difference.
      const double h = 1e-3 * n;
      const double d1 = oracle::central_difference(ll, n, h);
      const double d2 = oracle::central_difference(ll, n, h / 2);
      const double fd = (4 * d2 - d1) / 3;
      if (std::fabs(s) < 1e-2) continue;  // relative error is meaningless at the root
      EXPECT_LT(std::fabs(fd - s), 1e-6 * std::fabs(s)) << "fixture seed " << f.seed << " n=" << n;
      ++checked;
    }
  }
  EXPECT_GT(checked, 50);
}

TEST(Score, NonIncreasingInShape) {
  for (const auto& f : fixtures()) {
    const auto d = draw(f);
    const auto& p = f.truth;
    double prev = INFINITY;
    for (double n = 1e-3; n < 50; n *= 1.1) {
      const double s = score(d, p.a, p.m, p.b, n);
      EXPECT_LE(s, prev + 1e-9 * std::fabs(prev));
      prev = s;
    }
  }
}

TEST(FitMle, Examples) {
  const auto r = fit_mle(kFlat, 0, 2, 4);
  EXPECT_NEAR(r.n_hat, 1.0, 1e-6);
  EXPECT_EQ(r.status, FitStatus::Converged);
  EXPECT_EQ(r.method, Method::MLE);
  EXPECT_NEAR(r.objective, -4 * std::log(4.0), 1e-12);
  EXPECT_FALSE(r.moment_order_used.has_value());

  const auto up = fit_mle(kCentre, 0, 2, 4);
  EXPECT_EQ(up.status, FitStatus::AtUpperBound);
  EXPECT_EQ(up.n_hat, 50.0);

  RngState rng(20240101);
  const auto s = sample_many({-10, 0, 10, 0.5}, 100, rng);
  const auto u = fit_mle(s, -10, 0, 10);
  EXPECT_GE(u.n_hat, 0.3);
  EXPECT_LE(u.n_hat, 0.9);
}

TEST(FitMle, LowerBoundWhenDataSitsAtEndpoints) {
  const auto r = fit_mle(Data{0, 0, 3, 3, 3, 0}, 0, 2, 4);
  EXPECT_EQ(r.status, FitStatus::AtLowerBound);
  EXPECT_EQ(r.n_hat, 1e-3);
}

TEST(FitMle, MatchesGridOracle) {
  for (const auto& f : fixtures()) {
    const auto d = draw(f);
    const auto& p = f.truth;
    const auto r = fit_mle(d, p.a, p.m, p.b);
    const double grid = oracle::grid_argmax([&](double n) { return log_likelihood(d, p.a, p.m, p.b, n); }, 1e-3, 50.0);
    EXPECT_NEAR(r.n_hat, grid, 1e-4) << "seed " << f.seed;
    EXPECT_GE(r.n_hat, 1e-3);
    EXPECT_LE(r.n_hat, 50.0);
    if (r.status == FitStatus::Converged) {
      EXPECT_LE(r.iterations, 200);
    }
  }
}

TEST(FitMle, ReflectionInvariance) {
  for (const auto& f : fixtures()) {
    const auto d = draw(f);
    const auto& p = f.truth;
    Data mirrored;
    for (auto y : d) mirrored.push_back(p.a + p.b - 1 - y);
    const auto r1 = fit_mle(d, p.a, p.m, p.b);
    const auto r2 = fit_mle(mirrored, p.a, p.a + p.b - p.m, p.b);
    EXPECT_NEAR(r1.n_hat, r2.n_hat, 1e-7) << "seed " << f.seed;
    EXPECT_EQ(r1.status, r2.status);
  }
}

TEST(FitMle, CustomIntervalAndErrors) {
  FitOptions narrow;
  narrow.n_lo = 2.0;
  narrow.n_hi = 3.0;
  const auto r = fit_mle(kFlat, 0, 2, 4, narrow);
  EXPECT_EQ(r.status, FitStatus::AtLowerBound);
  EXPECT_EQ(r.n_hat, 2.0);

  FitOptions bad;
  bad.n_lo = 5.0;
  bad.n_hi = 1.0;
  EXPECT_EQ(kind_of([&] { fit_mle(kFlat, 0, 2, 4, bad); }), ErrorKind::InvalidInterval);
  bad.n_lo = 0.0;
  EXPECT_EQ(kind_of([&] { fit_mle(kFlat, 0, 2, 4, bad); }), ErrorKind::InvalidInterval);
  EXPECT_EQ(kind_of([] { fit_mle(Data{}, 0, 2, 4); }), ErrorKind::EmptyData);
  EXPECT_EQ(kind_of([] { fit_mle(Data{9}, 0, 2, 4); }), ErrorKind::DataOutOfSupport);
  EXPECT_EQ(kind_of([] { fit_mme(Data{}, 0, 2, 4); }), ErrorKind::EmptyData);
  EXPECT_EQ(kind_of([] { fit_mme(Data{4}, 0, 2, 4); }), ErrorKind::DataOutOfSupport);
}

TEST(FitMme, SymmetricFallsBackToSecondMoment) {
  const auto r = fit_mme(kFlat, 0, 2, 4);
  EXPECT_NEAR(r.n_hat, 1.0, 1e-6);
  ASSERT_TRUE(r.moment_order_used.has_value());
  EXPECT_EQ(*r.moment_order_used, 2);
  EXPECT_EQ(r.status, FitStatus::Converged);
  EXPECT_NEAR(second_moment_closed_form({0, 2, 4, 1.0}), 3.5, 1e-14);
}

TEST(FitMme, MatchesUniformVariance) {
  Data d(20);
  std::iota(d.begin(), d.end(), -10);
  const auto r = fit_mme(d, -10, 0, 10);
  EXPECT_NEAR(r.n_hat, 1.0, 1e-6);
  EXPECT_EQ(*r.moment_order_used, 2);
}

TEST(FitMme, PeakedSampleBand) {
  // The band holds for roughly 70% of seeds at this sample size.
  RngState rng(7);
  const auto s = sample_many({-10, 0, 10, 3.5}, 100, rng);
  const auto r = fit_mme(s, -10, 0, 10);
  EXPECT_GE(r.n_hat, 3.0);
  EXPECT_LE(r.n_hat, 3.8);
}

TEST(FitMme, ConvergedFitsMatchTheMoment) {
  int first_order = 0;
  for (const auto& f : fixtures()) {
    const auto d = draw(f);
    const auto& p = f.truth;
    const auto r = fit_mme(d, p.a, p.m, p.b);
    ASSERT_TRUE(r.moment_order_used.has_value());
    EXPECT_GE(r.n_hat, 1e-3);
    EXPECT_LE(r.n_hat, 50.0);
    if (r.status != FitStatus::Converged) continue;
    double m1 = 0, m2 = 0;
    for (auto y : d) m1 += double(y), m2 += double(y) * double(y);
    m1 /= d.size();
    m2 /= d.size();
    const DtspParams fitted{p.a, p.m, p.b, r.n_hat};
    if (*r.moment_order_used == 1) {
      ++first_order;
      EXPECT_LT(std::fabs(mean_closed_form(fitted) - m1), 1e-8) << "seed " << f.seed;
    } else {
      EXPECT_LT(std::fabs(second_moment_closed_form(fitted) - m2), 1e-8 * std::max(1.0, m2)) << "seed " << f.seed;
    }
  }
  EXPECT_GT(first_order, 3);
}

TEST(FitMme, BoundaryWhenMomentUnreachable) {
  // Sample mean 0.25 lies below every mean DTSP(0,1,4,n) can reach on the interval.
  const auto r = fit_mme(Data{0, 0, 0, 1}, 0, 1, 4);
  EXPECT_NE(r.status, FitStatus::Converged);
  EXPECT_EQ(*r.moment_order_used, 1);
  EXPECT_TRUE(r.n_hat == 1e-3 || r.n_hat == 50.0);
  EXPECT_GT(r.objective, 0.0);
}

TEST(FitMme, DegenerateWhenNoMomentDependsOnShape) {
  // Width 1: a single support point, every moment is constant in n.
  const auto r = fit_mme(Data{3, 3}, 3, 3, 4);
  EXPECT_EQ(r.status, FitStatus::DegenerateMoment);
  EXPECT_EQ(r.n_hat, 1.0);
  EXPECT_EQ(fit(Method::MME, Data{3}, 3, 4, 4).status, FitStatus::DegenerateMoment);
}

TEST(EndpointsHeuristic, Examples) {
  EXPECT_EQ(endpoints_heuristic(Data{0, 1, 1, 2, 3}), (Endpoints{0, 1, 4}));
  EXPECT_EQ(endpoints_heuristic(Data{5}), (Endpoints{5, 5, 6}));
  EXPECT_EQ(endpoints_heuristic(Data{-2, -2, 0, 1}), (Endpoints{-2, -2, 2}));
  EXPECT_EQ(endpoints_heuristic(Data{4, 7, 4, 7, 9}), (Endpoints{4, 4, 10}));
  EXPECT_EQ(kind_of([] { endpoints_heuristic(Data{}); }), ErrorKind::EmptyData);
}

TEST(ReadObservations, PlainAndHeader) {
  std::istringstream plain("0\n1\n\n  2 \r\n3\n");
  EXPECT_EQ(read_observations(plain), kFlat);
  std::istringstream csv("y\n-4\n7\n");
  EXPECT_EQ(read_observations(csv), (Data{-4, 7}));
  std::istringstream empty("\n\n");
  EXPECT_TRUE(read_observations(empty).empty());
}

TEST(ReadObservations, ParseErrorsCarryLineNumber) {
  for (const char* text : {"1\n2\nabc\n", "1\n\n1.5\n", "y\n2\ny\n", "Y\n1\n", "1\n2 3\n"}) {
    std::istringstream in(text);
    try {
      read_observations(in);
      ADD_FAILURE() << "accepted: " << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::ParseError);
      EXPECT_NE(std::string(e.what()).find("line "), std::string::npos);
    }
  }
  std::istringstream in("1\n2\nabc\n");
  try {
    read_observations(in);
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
}

}  // namespace
}  // namespace dtsp
