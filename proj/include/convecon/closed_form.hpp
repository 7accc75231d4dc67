#pragma once

#include <optional>
#include <string_view>

#include "convecon/model.hpp"

// Printed optimal-strategy formulas for the three interaction models.
//
// Every formula is implemented exactly as written, including the variants
// that do not satisfy the first-order conditions of the underlying problem.
// The oracle module decides which of them are actually optimal.

namespace convecon {

/// A count produced by a formula that may go negative. Negative raw values
/// are clamped to zero and flagged as a corner.
struct ClampedValue {
  double value;
  double raw;
  bool corner;
};

ClampedValue clamp_count(double raw);

/// beta Cq / ((alpha - beta) Ca). Requires alpha > beta.
double a0_star(const ValidatedParams& p);

/// (beta Cq + f Cf) / ((gamma1 f + alpha - beta) Ca). Requires
/// gamma1 f + alpha > beta.
double a1_star(double f, const ValidatedParams& p);

/// (beta Cq + (alpha - beta) a Ca) / (gamma1 a Ca + beta Cf).
ClampedValue f1_star(double a, const ValidatedParams& p);

/// beta (Cq + f Cf) / ((alpha - beta) (f + 1) Ca). Requires alpha > beta.
double a2_star_partial(double f, const ValidatedParams& p);

/// (gamma2 (Cq + Cf) - alpha (1 + f) Cf) / ((alpha - gamma2) (1 + f) Ca).
/// DomainError when alpha == gamma2.
ClampedValue a2_star_full(double f, const ValidatedParams& p);

/// ((gamma2 - beta) Cq + (beta - alpha) Cf) / ((alpha - gamma2) Cf).
/// DomainError when alpha == gamma2.
ClampedValue f2_star(const ValidatedParams& p);

/// Draft variant coupled to a:
/// (beta Cq + (alpha - beta) a Ca) / ((alpha - beta) a Ca + beta Cf).
ClampedValue f2_star_draft(double a, const ValidatedParams& p);

/// Q that puts (f, a) exactly on the gain constraint of `model`.
double recover_q(const GainTarget& g, double f, double a, ModelKind model,
                 const EfficiencyParams& eff);

enum class SolutionSource {
  Model0,
  Model1Coupled,
  Model2Partial,
  Model2Full,
  Model2DraftCoupled
};

std::string_view source_name(SolutionSource s);

struct ClosedFormSolution {
  double a_star = 0.0;
  double f_star = 0.0;
  double q_star = 0.0;
  SolutionSource source = SolutionSource::Model0;
  bool corner = false;
  std::optional<double> raw_a;  // set when a_star was clamped
  std::optional<double> raw_f;  // set when f_star was clamped
  int iterations = 0;
};

struct FixedPointOptions {
  double tol = 1e-9;
  int max_iter = 1000;
  double damping = 0.5;
};

/// Model 0 optimum with Q from the gain constraint.
ClosedFormSolution model0_solve(const ValidatedParams& p, const GainTarget& g);

/// Damped fixed point of a <- a1_star(f), f <- max(0, f1_star(a)), started
/// from (a0_star or 1, 0). Throws Diverged when max_iter is reached.
ClosedFormSolution model1_solve(const ValidatedParams& p, const GainTarget& g,
                                const FixedPointOptions& opt = {});

/// f2_star with a2_star_full evaluated at it.
ClosedFormSolution model2_full_solve(const ValidatedParams& p,
                                     const GainTarget& g);

/// f2_star with a2_star_partial evaluated at it.
ClosedFormSolution model2_partial_solve(const ValidatedParams& p,
                                        const GainTarget& g);

/// Damped fixed point of the draft pair a2_star_partial / f2_star_draft.
ClosedFormSolution model2_draft_solve(const ValidatedParams& p,
                                      const GainTarget& g,
                                      const FixedPointOptions& opt = {});

}  // namespace convecon
