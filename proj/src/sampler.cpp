#include "fpwb/sampler.hpp"

#include <algorithm>

#include "fpwb/error.hpp"
#include "fpwb/float_bits.hpp"

namespace fpwb {

Point Sample::point(std::size_t i) const {
  Point p;
  for (std::size_t v = 0; v < vars.size(); ++v) p.emplace(vars[v], points.at(i)[v]);
  return p;
}

std::size_t Sample::slot(const std::string& var) const {
  auto it = std::find(vars.begin(), vars.end(), var);
  if (it == vars.end()) {
    throw Error(ErrorCode::UnboundVariable, "variable '" + var + "' is not in the sample");
  }
  return static_cast<std::size_t>(it - vars.begin());
}

SamplerCounters& sampler_counters() {
  static SamplerCounters counters;
  return counters;
}

std::uint64_t draw_uniform(std::mt19937_64& engine, std::uint64_t lo, std::uint64_t hi) {
  std::uint64_t width = hi - lo + 1;  // wraps to 0 for the full 64-bit span
  if (width == 0) return engine();
  std::uint64_t reject_below = (0 - width) % width;
  std::uint64_t r;
  do {
    r = engine();
  } while (r < reject_below);
  return lo + r % width;
}

double draw_ordinal_uniform(std::mt19937_64& engine, double lo, double hi) {
  std::int64_t olo = to_ordinal(lo);
  std::int64_t ohi = to_ordinal(hi);
  // Shift into unsigned space so the subtraction cannot overflow.
  constexpr std::uint64_t bias = std::uint64_t{1} << 63;
  std::uint64_t ulo = static_cast<std::uint64_t>(olo) + bias;
  std::uint64_t uhi = static_cast<std::uint64_t>(ohi) + bias;
  std::uint64_t u = draw_uniform(engine, ulo, uhi);
  return from_ordinal(static_cast<std::int64_t>(u - bias));
}

Sample sample(const Spec& spec) {
  validate_spec(spec);
  sampler_counters().samples_drawn.fetch_add(1, std::memory_order_relaxed);

  Sample out;
  out.spec_key = spec_key(spec);
  out.expr = spec.expr;
  out.vars = spec.var_names();
  out.seed = spec.seed;
  out.requested = spec.points;

  std::mt19937_64 engine(spec.seed);
  const std::size_t max_attempts = kOversampleFactor * spec.points;
  std::vector<double> values(spec.vars.size());
  while (out.points.size() < spec.points && out.attempts < max_attempts) {
    ++out.attempts;
    for (std::size_t v = 0; v < spec.vars.size(); ++v) {
      values[v] = draw_ordinal_uniform(engine, spec.vars[v].lo, spec.vars[v].hi);
    }
    ExactValue exact = eval_exact(spec.expr, out.vars, values);
    if (!exact.valid()) continue;
    out.points.push_back(values);
    out.exacts.push_back(exact.rounded);
  }
  out.achieved = out.points.size();
  out.truncated = out.achieved < out.requested;
  if (out.achieved == 0) {
    throw Error(ErrorCode::EmptySample,
                "no valid input points found in the given ranges after " +
                    std::to_string(out.attempts) + " attempts");
  }
  return out;
}

Sample resample(const Spec& spec, const std::vector<VarRange>& ranges) {
  return sample(spec.with_ranges(ranges));
}

}  // namespace fpwb
