#pragma once

// Inverse-transform sampling: U ~ U[0,1), X = F_TSP^{-1}(U), Y = floor(X).

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "dtsp/dtsp.hpp"
#include "dtsp/error.hpp"
#include "dtsp/rng.hpp"
#include "dtsp/tsp_continuous.hpp"

namespace dtsp {

struct Provenance {
  DtspParams params;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

struct Sample {
  std::vector<std::int64_t> values;
  std::optional<Provenance> provenance;
};

/// Maps one uniform deviate to a DTSP variate. The clamp to [a, b-1] only
/// matters when rounding pushes X onto b.
inline std::int64_t sample_from_uniform(const DtspParams& p, double u) {
  validate(p);
  const double x = tsp_quantile(continuous_parent(p), u);
  auto y = static_cast<std::int64_t>(std::floor(x));
  if (y > p.b - 1) y = p.b - 1;
  if (y < p.a) y = p.a;
  return y;
}

inline std::int64_t sample_one(const DtspParams& p, RngState& rng) {
  return sample_from_uniform(p, rng.uniform());
}

inline Sample sample_many(const DtspParams& p, std::size_t count, RngState& rng) {
  validate(p);
  if (count == 0) throw Error(ErrorKind::InvalidParameter, "sample_many: count must be >= 1");
  Sample s;
  s.provenance = Provenance{p, rng.seed(), rng.stream()};
  s.values.reserve(count);
  for (std::size_t i = 0; i < count; ++i) s.values.push_back(sample_one(p, rng));
  return s;
}

}  // namespace dtsp
