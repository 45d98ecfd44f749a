#include "fpwb/regimes.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <limits>

#include "bigfloat.hpp"
#include "fpwb/analysis.hpp"
#include "fpwb/emit.hpp"
#include "fpwb/error.hpp"
#include "fpwb/float_bits.hpp"

namespace fpwb {

double ordinal_midpoint(double a, double b) {
  __int128 sum = static_cast<__int128>(to_ordinal(a)) + to_ordinal(b);
  __int128 half = sum >= 0 ? sum / 2 : -((-sum + 1) / 2);
  return from_ordinal(static_cast<std::int64_t>(half));
}

namespace {

bool literal_ok(const std::string& s, double t) {
  if (std::strtod(s.c_str(), nullptr) != t) return false;
  detail::BigFloat exact(4096);
  detail::BigFloat bound(64);
  mpfr_strtofr(exact.get(), s.c_str(), nullptr, 10, MPFR_RNDD);
  mpfr_set_d(bound.get(), t, MPFR_RNDN);
  return mpfr_cmp(exact.get(), bound.get()) >= 0;
}

}  // namespace

std::string threshold_literal(double t) {
  std::string s = format_double(t);
  if (literal_ok(s, t)) return s;
  // %e with enough digits eventually prints the exact binary value.
  for (int digits = 17; digits < 800; ++digits) {
    char buf[1024];
    std::snprintf(buf, sizeof buf, "%.*e", digits, t);
    if (literal_ok(buf, t)) return canonical_number(buf);
  }
  throw Error(ErrorCode::Internal, "no decimal literal found for threshold");
}

RegimeResult infer_regimes(const std::vector<Expr>& candidates,
                           const std::vector<std::vector<double>>& bits, const Sample& sample,
                           const RegimeOptions& options) {
  if (candidates.empty()) throw Error(ErrorCode::BadRequest, "no candidates to combine");
  if (bits.size() != candidates.size()) {
    throw Error(ErrorCode::Internal, "error table does not match the candidate list");
  }
  const std::size_t slot = sample.slot(options.var);
  const std::size_t n = sample.size();
  const std::size_t m = candidates.size();

  RegimeResult out;
  out.order.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.order[i] = i;
  std::stable_sort(out.order.begin(), out.order.end(), [&](std::size_t a, std::size_t b) {
    return to_ordinal(sample.points[a][slot]) < to_ordinal(sample.points[b][slot]);
  });

  if (m > 1 && std::all_of(candidates.begin(), candidates.end(),
                           [&](const Expr& c) { return c == candidates[0]; })) {
    throw Error(ErrorCode::Degenerate, "all candidates are the same expression");
  }

  // prefix[c][p]: candidate c's summed error over the first p sorted points.
  std::vector<std::vector<double>> prefix(m, std::vector<double>(n + 1, 0.0));
  for (std::size_t c = 0; c < m; ++c) {
    for (std::size_t p = 0; p < n; ++p) prefix[c][p + 1] = prefix[c][p] + bits[c][out.order[p]];
  }
  auto segment_best = [&](std::size_t from, std::size_t to, std::size_t& which) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < m; ++c) {
      double v = prefix[c][to] - prefix[c][from];
      if (v < best) {
        best = v;
        which = c;
      }
    }
    return best;
  };
  // A split may only fall between points with different split values.
  std::vector<bool> can_split(n + 1, false);
  for (std::size_t p = 1; p < n; ++p) {
    can_split[p] = to_ordinal(sample.points[out.order[p - 1]][slot]) !=
                   to_ordinal(sample.points[out.order[p]][slot]);
  }

  const std::size_t kmax = std::max<std::size_t>(1, std::min(options.max_branches, n));
  constexpr double inf = std::numeric_limits<double>::infinity();
  // dp[k][p]: best cost of covering the first p points with k + 1 segments.
  std::vector<std::vector<double>> dp(kmax, std::vector<double>(n + 1, inf));
  std::vector<std::vector<std::size_t>> from(kmax, std::vector<std::size_t>(n + 1, 0));
  for (std::size_t p = 1; p <= n; ++p) {
    std::size_t c;
    dp[0][p] = segment_best(0, p, c);
  }
  for (std::size_t k = 1; k < kmax; ++k) {
    for (std::size_t p = 1; p <= n; ++p) {
      for (std::size_t j = 1; j < p; ++j) {
        if (!can_split[j] || dp[k - 1][j] == inf) continue;
        std::size_t c;
        double v = dp[k - 1][j] + segment_best(j, p, c) + options.split_penalty;
        if (v < dp[k][p]) {
          dp[k][p] = v;
          from[k][p] = j;
        }
      }
    }
  }
  std::size_t best_k = 0;
  for (std::size_t k = 1; k < kmax; ++k) {
    if (dp[k][n] < dp[best_k][n]) best_k = k;
  }
  out.cost = dp[best_k][n];

  std::vector<std::size_t> cuts;  // segment start positions
  for (std::size_t k = best_k, p = n; k > 0; --k) {
    p = from[k][p];
    cuts.push_back(p);
  }
  cuts.push_back(0);
  std::reverse(cuts.begin(), cuts.end());
  for (std::size_t s = 0; s < cuts.size(); ++s) {
    std::size_t end = s + 1 < cuts.size() ? cuts[s + 1] : n;
    RegimeSegment seg;
    seg.first = cuts[s];
    seg.last = end - 1;
    segment_best(cuts[s], end, seg.candidate);
    out.segments.push_back(seg);
  }
  for (std::size_t s = 0; s + 1 < out.segments.size(); ++s) {
    double a = sample.points[out.order[out.segments[s].last]][slot];
    double b = sample.points[out.order[out.segments[s + 1].first]][slot];
    out.thresholds.push_back(ordinal_midpoint(a, b));
  }

  Expr var = Expr::var(options.var);
  out.expr = candidates[out.segments.back().candidate];
  for (std::size_t s = out.segments.size() - 1; s-- > 0;) {
    Expr cond = Expr::make(Op::Le, {var, Expr::num(threshold_literal(out.thresholds[s]))});
    out.expr = Expr::make(Op::If, {cond, candidates[out.segments[s].candidate], out.expr});
  }
  return out;
}

RegimeResult infer_regimes(const std::vector<Expr>& candidates, const Sample& sample,
                           const RegimeOptions& options) {
  std::vector<std::vector<double>> bits;
  for (const auto& c : candidates) bits.push_back(analyze(c, sample).bits);
  return infer_regimes(candidates, bits, sample, options);
}

}  // namespace fpwb
