#pragma once

#include <chrono>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <stop_token>
#include <string>
#include <vector>

#include "fpwb/analysis.hpp"
#include "fpwb/expr.hpp"
#include "fpwb/sampler.hpp"
#include "fpwb/spec.hpp"

namespace fpwb {

enum class Soundness { ExactIdentity, GuardedApproximation };

/// `|term| <= bound` (or `>=` when `at_least`) must hold at every sample
/// point for a guarded rule to fire.
struct Guard {
  Expr term;  // pattern over the rule's metavariables
  double bound = 0.0;
  bool at_least = false;
};

/// Identifiers in lhs/rhs are metavariables; literals match literals of
/// equal value.
struct RewriteRule {
  std::string name;
  Expr lhs;
  Expr rhs;
  Soundness soundness = Soundness::ExactIdentity;
  std::optional<Guard> guard;
  std::string description;
};

/// Name of the built-in rule that folds arithmetic on literals whose
/// result is an exact decimal.
inline constexpr std::string_view kConstFold = "const-fold";

/// The built-in catalog. Immutable after first use.
const std::vector<RewriteRule>& rule_db();
const RewriteRule* find_rule(std::string_view name);

using Bindings = std::map<std::string, Expr, std::less<>>;
std::optional<Bindings> match_pattern(const Expr& pattern, const Expr& e);
Expr instantiate(const Expr& pattern, const Bindings& bindings);

/// Rewrites the subterm at `path` with the rule, ignoring its guard.
/// Returns nothing when the rule does not match there.
std::optional<Expr> apply_rule(const RewriteRule& rule, const Expr& e, const Path& path);
/// Literal folding at `path`, same contract as apply_rule.
std::optional<Expr> fold_constants(const Expr& e, const Path& path);

/// True when the rule's guard holds for the matched subterm at every point.
bool guard_holds(const RewriteRule& rule, const Bindings& bindings, const Sample& sample);

struct Step {
  std::string rule;
  Path path;
  Expr before;
  Expr after;
};

struct Derivation {
  std::vector<Step> steps;
};

/// Re-applies each step to `start`. Throws Divergence naming the first step
/// whose recorded expression does not match.
Expr replay(const Derivation& derivation, const Expr& start);

/// Every single-step rewrite of `e`. Guarded rules are checked against
/// `sample` and skipped entirely when no sample is given.
std::vector<Step> one_step_rewrites(const Expr& e, const Sample* sample);

struct SuggestOptions {
  std::size_t beam = 16;
  std::size_t depth = 4;
  std::size_t k = 5;
  std::chrono::milliseconds budget{20000};
  std::stop_token stop;
};

struct Suggestion {
  Expr expr;
  Derivation derivation;
  ErrorReport report;
};

struct SuggestResult {
  std::vector<Suggestion> candidates;
  bool timed_out = false;
  bool cancelled = false;
  std::size_t explored = 0;
};

/// Beam search over rule applications starting from `start`. Search ranks
/// expressions by their binary64 error against the sample's ground truth;
/// the survivors are then analyzed in full and anything worse than `start`
/// is discarded, so `start` itself is returned when nothing beats it.
/// When the budget runs out the best results so far are returned with
/// `timed_out` set.
SuggestResult suggest(const Spec& spec, const Sample& sample, const Expr& start,
                      const SuggestOptions& options = {});

}  // namespace fpwb
