#include "convecon/closed_form.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace convecon {

ClampedValue clamp_count(double raw) {
  if (raw < 0.0) return {0.0, raw, true};
  return {raw, raw, false};
}

double a0_star(const ValidatedParams& p) {
  const auto& e = p.eff();
  const auto& c = p.cost();
  const double denom = (e.alpha - e.beta) * c.c_assess;
  if (!(denom > 0.0))
    throw NoInteriorOptimum("a0_star needs alpha > beta");
  return e.beta * c.c_query / denom;
}

double a1_star(double f, const ValidatedParams& p) {
  if (!(f >= 0.0)) throw DomainError("f must be >= 0");
  const auto& e = p.eff();
  const auto& c = p.cost();
  const double denom = (e.gamma1 * f + e.alpha - e.beta) * c.c_assess;
  if (!(denom > 0.0))
    throw NoInteriorOptimum("a1_star needs gamma1*f + alpha > beta");
  return (e.beta * c.c_query + f * c.c_feedback) / denom;
}

ClampedValue f1_star(double a, const ValidatedParams& p) {
  if (!(a >= 0.0)) throw DomainError("a must be >= 0");
  const auto& e = p.eff();
  const auto& c = p.cost();
  const double denom = e.gamma1 * a * c.c_assess + e.beta * c.c_feedback;
  if (!(denom > 0.0)) throw DomainError("f1_star denominator is zero");
  return clamp_count((e.beta * c.c_query + (e.alpha - e.beta) * a * c.c_assess) /
                     denom);
}

double a2_star_partial(double f, const ValidatedParams& p) {
  if (!(f >= 0.0)) throw DomainError("f must be >= 0");
  const auto& e = p.eff();
  const auto& c = p.cost();
  const double denom = (e.alpha - e.beta) * (f + 1.0) * c.c_assess;
  if (!(denom > 0.0))
    throw NoInteriorOptimum("a2_star_partial needs alpha > beta");
  return e.beta * (c.c_query + f * c.c_feedback) / denom;
}

ClampedValue a2_star_full(double f, const ValidatedParams& p) {
  if (!(f >= 0.0)) throw DomainError("f must be >= 0");
  const auto& e = p.eff();
  const auto& c = p.cost();
  if (e.alpha == e.gamma2)
    throw DomainError("a2_star_full is undefined for alpha == gamma2");
  const double num =
      e.gamma2 * (c.c_query + c.c_feedback) - e.alpha * (1.0 + f) * c.c_feedback;
  return clamp_count(num / ((e.alpha - e.gamma2) * (1.0 + f) * c.c_assess));
}

ClampedValue f2_star(const ValidatedParams& p) {
  const auto& e = p.eff();
  const auto& c = p.cost();
  if (e.alpha == e.gamma2)
    throw DomainError("f2_star is undefined for alpha == gamma2");
  const double num =
      (e.gamma2 - e.beta) * c.c_query + (e.beta - e.alpha) * c.c_feedback;
  return clamp_count(num / ((e.alpha - e.gamma2) * c.c_feedback));
}

ClampedValue f2_star_draft(double a, const ValidatedParams& p) {
  if (!(a >= 0.0)) throw DomainError("a must be >= 0");
  const auto& e = p.eff();
  const auto& c = p.cost();
  const double assess = (e.alpha - e.beta) * a * c.c_assess;
  const double denom = assess + e.beta * c.c_feedback;
  if (!(denom > 0.0))
    throw DomainError("f2_star_draft denominator must be > 0");
  return clamp_count((e.beta * c.c_query + assess) / denom);
}

double recover_q(const GainTarget& g, double f, double a, ModelKind model,
                 const EfficiencyParams& eff) {
  if (!(a > 0.0)) throw DomainError("recover_q needs a > 0");
  if (!(f >= 0.0)) throw DomainError("recover_q needs f >= 0");
  if (model == ModelKind::Baseline && f != 0.0)
    throw DomainError("f must be 0 for the baseline model");
  const double qexp = query_exponent(model, f, eff);
  if (!(qexp > 0.0)) throw DomainError("query exponent must be > 0");
  double rest = std::pow(a, eff.beta);
  if (model == ModelKind::FeedbackAfter) rest *= std::pow(1.0 + f, eff.gamma2);
  return std::pow(g.value() / rest, 1.0 / qexp);
}

std::string_view source_name(SolutionSource s) {
  switch (s) {
    case SolutionSource::Model0:
      return "Model0";
    case SolutionSource::Model1Coupled:
      return "Model1Coupled";
    case SolutionSource::Model2Partial:
      return "Model2Partial";
    case SolutionSource::Model2Full:
      return "Model2Full";
    case SolutionSource::Model2DraftCoupled:
      return "Model2DraftCoupled";
  }
  return "Model0";
}

ClosedFormSolution model0_solve(const ValidatedParams& p, const GainTarget& g) {
  ClosedFormSolution s;
  s.source = SolutionSource::Model0;
  s.a_star = a0_star(p);
  s.q_star = recover_q(g, 0.0, s.a_star, ModelKind::Baseline, p.eff());
  return s;
}

namespace {

// Damped Jacobi sweep over (a, f). `a_of_f` may throw NoInteriorOptimum,
// which propagates to the caller.
ClosedFormSolution damped_fixed_point(
    const ValidatedParams& p, const GainTarget& g, const FixedPointOptions& opt,
    ModelKind model, SolutionSource source,
    const std::function<double(double)>& a_of_f,
    const std::function<ClampedValue(double)>& f_of_a) {
  if (!(opt.tol > 0.0)) throw DomainError("tol must be > 0");
  if (opt.max_iter < 1) throw DomainError("max_iter must be >= 1");
  if (!(opt.damping > 0.0 && opt.damping <= 1.0))
    throw DomainError("damping must be in (0, 1]");

  double a = p.eff().alpha > p.eff().beta ? a0_star(p) : 1.0;
  double f = 0.0;
  ClampedValue f_target{0.0, 0.0, false};
  for (int it = 1; it <= opt.max_iter; ++it) {
    const double a_target = a_of_f(f);
    f_target = f_of_a(a);
    const double a_next = (1.0 - opt.damping) * a + opt.damping * a_target;
    const double f_next = (1.0 - opt.damping) * f + opt.damping * f_target.value;
    if (!std::isfinite(a_next) || !std::isfinite(f_next))
      throw Diverged("fixed-point iteration left the finite range", it);
    const double step = std::max(std::abs(a_next - a), std::abs(f_next - f));
    a = a_next;
    f = f_next;
    if (step < opt.tol) {
      ClosedFormSolution s;
      s.source = source;
      s.a_star = a;
      s.f_star = f;
      s.iterations = it;
      const ClampedValue final_f = f_of_a(a);
      if (final_f.corner) {
        s.corner = true;
        s.raw_f = final_f.raw;
      }
      s.q_star = recover_q(g, f, a, model, p.eff());
      return s;
    }
  }
  throw Diverged("fixed-point iteration did not converge within max_iter",
                 opt.max_iter);
}

}  // namespace

ClosedFormSolution model1_solve(const ValidatedParams& p, const GainTarget& g,
                                const FixedPointOptions& opt) {
  return damped_fixed_point(
      p, g, opt, ModelKind::FeedbackFirst, SolutionSource::Model1Coupled,
      [&](double f) { return a1_star(f, p); },
      [&](double a) { return f1_star(a, p); });
}

ClosedFormSolution model2_full_solve(const ValidatedParams& p,
                                     const GainTarget& g) {
  ClosedFormSolution s;
  s.source = SolutionSource::Model2Full;
  const ClampedValue f = f2_star(p);
  const ClampedValue a = a2_star_full(f.value, p);
  s.f_star = f.value;
  s.a_star = a.value;
  if (f.corner) s.raw_f = f.raw;
  if (a.corner) s.raw_a = a.raw;
  s.corner = f.corner || a.corner;
  if (!(a.value > 0.0))
    throw NoInteriorOptimum(
        "a2_star_full is clamped to 0; no finite Q reaches the gain target");
  s.q_star =
      recover_q(g, s.f_star, s.a_star, ModelKind::FeedbackAfter, p.eff());
  return s;
}

ClosedFormSolution model2_partial_solve(const ValidatedParams& p,
                                        const GainTarget& g) {
  ClosedFormSolution s;
  s.source = SolutionSource::Model2Partial;
  const ClampedValue f = f2_star(p);
  s.f_star = f.value;
  if (f.corner) {
    s.corner = true;
    s.raw_f = f.raw;
  }
  s.a_star = a2_star_partial(s.f_star, p);
  s.q_star =
      recover_q(g, s.f_star, s.a_star, ModelKind::FeedbackAfter, p.eff());
  return s;
}

ClosedFormSolution model2_draft_solve(const ValidatedParams& p,
                                      const GainTarget& g,
                                      const FixedPointOptions& opt) {
  return damped_fixed_point(
      p, g, opt, ModelKind::FeedbackAfter, SolutionSource::Model2DraftCoupled,
      [&](double f) { return a2_star_partial(f, p); },
      [&](double a) { return f2_star_draft(a, p); });
}

}  // namespace convecon
