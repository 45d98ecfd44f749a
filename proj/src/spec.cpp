#include "fpwb/spec.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "fpwb/emit.hpp"
#include "fpwb/error.hpp"

namespace fpwb {

const VarRange* Spec::find(std::string_view name) const {
  for (const auto& v : vars) {
    if (v.name == name) return &v;
  }
  return nullptr;
}

std::vector<std::string> Spec::var_names() const {
  std::vector<std::string> out;
  for (const auto& v : vars) out.push_back(v.name);
  return out;
}

Spec Spec::with_ranges(const std::vector<VarRange>& ranges) const {
  Spec out = *this;
  for (const auto& r : ranges) {
    bool found = false;
    for (auto& v : out.vars) {
      if (v.name == r.name) {
        v = r;
        found = true;
      }
    }
    if (!found) {
      throw Error(ErrorCode::InvalidRange, "range given for unknown variable '" + r.name + "'");
    }
  }
  return out;
}

bool Spec::operator==(const Spec& other) const {
  return expr == other.expr && vars == other.vars && points == other.points &&
         seed == other.seed;
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("FPWB_SEED")) {
    char* end = nullptr;
    errno = 0;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (errno == 0 && end != env && *end == '\0') return v;
  }
  return kDefaultSeedValue;
}

Spec make_spec(Expr expr, const std::vector<VarRange>& ranges, std::size_t points,
               std::uint64_t seed, bool fill_missing) {
  Spec spec;
  spec.points = points;
  spec.seed = seed;
  for (const auto& name : free_variables(expr)) {
    const VarRange* given = nullptr;
    for (const auto& r : ranges) {
      if (r.name == name) given = &r;
    }
    if (given) {
      spec.vars.push_back(*given);
    } else if (fill_missing) {
      spec.vars.push_back({name, -kMaxFinite, kMaxFinite});
    } else {
      throw Error(ErrorCode::InvalidRange, "no range given for variable '" + name + "'");
    }
  }
  for (const auto& r : ranges) {
    if (!spec.find(r.name)) spec.vars.push_back(r);
  }
  spec.expr = std::move(expr);
  validate_spec(spec);
  return spec;
}

void validate_spec(const Spec& spec) {
  validate(spec.expr);
  if (spec.points == 0) throw Error(ErrorCode::InvalidRange, "sample size must be positive");
  for (std::size_t i = 0; i < spec.vars.size(); ++i) {
    const auto& v = spec.vars[i];
    for (std::size_t j = 0; j < i; ++j) {
      if (spec.vars[j].name == v.name) {
        throw Error(ErrorCode::InvalidRange, "variable '" + v.name + "' has two ranges");
      }
    }
    if (!(std::isfinite(v.lo) && std::isfinite(v.hi))) {
      throw Error(ErrorCode::InvalidRange, "range of '" + v.name + "' must be finite");
    }
    if (!(v.lo < v.hi)) {
      throw Error(ErrorCode::InvalidRange,
                  "range of '" + v.name + "' needs lo < hi, got [" + format_double(v.lo) +
                      ", " + format_double(v.hi) + "]");
    }
  }
  for (const auto& name : free_variables(spec.expr)) {
    if (!spec.find(name)) {
      throw Error(ErrorCode::UnboundVariable, "variable '" + name + "' has no range");
    }
  }
}

std::string spec_key(const Spec& spec) {
  // FNV-1a over the canonical FPCore text, which already carries size and seed.
  std::string text = emit_fpcore(spec.expr, spec);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

double parse_bound(std::string_view text) {
  std::string s(text);
  if (s.empty()) throw Error(ErrorCode::InvalidRange, "empty range bound");
  char* end = nullptr;
  errno = 0;
  double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) {
    throw Error(ErrorCode::InvalidRange, "malformed range bound '" + s + "'");
  }
  if (std::isinf(v) || errno == ERANGE) {
    if (std::isinf(v) || std::fabs(v) > 1.0) v = v < 0 ? -kMaxFinite : kMaxFinite;
  }
  if (std::isnan(v)) throw Error(ErrorCode::InvalidRange, "range bound is NaN");
  return v == 0.0 ? 0.0 : v;
}

VarRange parse_range_flag(std::string_view text) {
  auto eq = text.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw Error(ErrorCode::InvalidRange, "range must look like name=LO:HI, got '" +
                                             std::string(text) + "'");
  }
  std::string_view bounds = text.substr(eq + 1);
  auto colon = bounds.find(':');
  if (colon == std::string_view::npos) {
    throw Error(ErrorCode::InvalidRange, "range must look like name=LO:HI, got '" +
                                             std::string(text) + "'");
  }
  return {std::string(text.substr(0, eq)), parse_bound(bounds.substr(0, colon)),
          parse_bound(bounds.substr(colon + 1))};
}

}  // namespace fpwb
