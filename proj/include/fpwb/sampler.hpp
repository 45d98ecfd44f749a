#pragma once

#include <atomic>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "fpwb/oracle.hpp"
#include "fpwb/spec.hpp"

namespace fpwb {

/// Seeded set of valid input points for a Spec with their rounded exact
/// outputs. Identical specs produce bit-identical samples.
struct Sample {
  std::string spec_key;
  Expr expr;                               // the spec expression (ground truth)
  std::vector<std::string> vars;           // slot order of every point
  std::vector<std::vector<double>> points;  // points[i][slot]
  std::vector<double> exacts;              // rounded exact output per point
  std::uint64_t seed = 0;
  std::size_t requested = 0;
  std::size_t achieved = 0;
  std::size_t attempts = 0;
  /// Set when oversampling gave up before reaching `requested`.
  bool truncated = false;

  std::size_t size() const { return points.size(); }
  Point point(std::size_t i) const;
  std::size_t slot(const std::string& var) const;
};

/// Ordinal-uniform sampling: each variable is drawn uniformly over the
/// representable doubles in [lo, hi], which spreads points across binades.
/// Points whose exact value is invalid or unsamplable are redrawn; the
/// sampler stops after 25 * points attempts. Throws EmptySample when no
/// valid point was found.
Sample sample(const Spec& spec);

/// `sample` on the spec with `ranges` substituted by variable name.
Sample resample(const Spec& spec, const std::vector<VarRange>& ranges);

inline constexpr std::size_t kOversampleFactor = 25;

/// Uniform draw in [lo, hi] (inclusive) from a 64-bit engine, by rejection;
/// the result depends only on the engine's output sequence.
std::uint64_t draw_uniform(std::mt19937_64& engine, std::uint64_t lo, std::uint64_t hi);

/// Uniform over the ordinals of [lo, hi].
double draw_ordinal_uniform(std::mt19937_64& engine, double lo, double hi);

struct SamplerCounters {
  std::atomic<std::uint64_t> samples_drawn{0};
};
SamplerCounters& sampler_counters();

}  // namespace fpwb
