#include "convecon/model.hpp"

#include <cmath>

namespace convecon {

std::string_view model_tag(ModelKind model) {
  switch (model) {
    case ModelKind::Baseline:
      return "m0";
    case ModelKind::FeedbackFirst:
      return "m1";
    case ModelKind::FeedbackAfter:
      return "m2";
  }
  return "m0";
}

ModelKind parse_model_tag(std::string_view tag) {
  if (tag == "m0") return ModelKind::Baseline;
  if (tag == "m1") return ModelKind::FeedbackFirst;
  if (tag == "m2") return ModelKind::FeedbackAfter;
  throw DomainError("unknown model '" + std::string(tag) +
                    "' (expected m0, m1 or m2)");
}

bool Strategy::is_integral() const {
  return q == std::floor(q) && f == std::floor(f) && a == std::floor(a);
}

void check_strategy(const Strategy& s) {
  auto check = [](double v, const char* name) {
    if (!std::isfinite(v) || v < 0.0)
      throw DomainError(std::string(name) + " must be finite and >= 0");
  };
  check(s.q, "q");
  check(s.f, "f");
  check(s.a, "a");
  if (s.model == ModelKind::Baseline && s.f != 0.0)
    throw DomainError("f must be 0 for the baseline model");
}

GainTarget::GainTarget(double g) : g_(g) {
  if (!std::isfinite(g) || g <= 0.0)
    throw DomainError("gain target must be finite and > 0");
}

ValidatedParams validate(const EfficiencyParams& eff, const CostParams& cost) {
  auto fail = [](const std::string& msg) { throw DomainError(msg); };
  auto finite = [&](double v, const char* name) {
    if (!std::isfinite(v)) fail(std::string(name) + " must be finite");
  };

  finite(eff.alpha, "alpha");
  finite(eff.beta, "beta");
  finite(eff.gamma1, "gamma1");
  finite(eff.gamma2, "gamma2");
  if (eff.alpha <= 0.0) fail("alpha must be > 0");
  if (eff.alpha > 1.0) fail("alpha must be <= 1");
  if (eff.beta <= 0.0) fail("beta must be > 0");
  if (eff.beta > 1.0) fail("beta must be <= 1");
  if (eff.gamma1 < 0.0) fail("gamma1 must be >= 0");
  if (eff.gamma2 < 0.0) fail("gamma2 must be >= 0");
  if (eff.gamma2 > 1.0) fail("gamma2 must be <= 1");

  finite(cost.c_query, "c_query");
  finite(cost.c_feedback, "c_feedback");
  finite(cost.c_assess, "c_assess");
  if (cost.c_query <= 0.0) fail("c_query must be > 0");
  if (cost.c_feedback <= 0.0) fail("c_feedback must be > 0");
  if (cost.c_assess <= 0.0) fail("c_assess must be > 0");

  return ValidatedParams(eff, cost);
}

GammaValue gamma_fn(double f, const EfficiencyParams& eff) {
  if (!(f >= 0.0)) throw DomainError("f must be >= 0");
  const double v = eff.gamma1 * f + eff.alpha;
  return {v, v > 1.0};
}

double query_exponent(ModelKind model, double f, const EfficiencyParams& eff) {
  return model == ModelKind::FeedbackFirst ? gamma_fn(f, eff).value
                                           : eff.alpha;
}

// std::pow(0, 0) == 1, so a zero strategy evaluates to a defined gain.
double gain(const Strategy& s, const EfficiencyParams& eff) {
  check_strategy(s);
  switch (s.model) {
    case ModelKind::Baseline:
      return std::pow(s.q, eff.alpha) * std::pow(s.a, eff.beta);
    case ModelKind::FeedbackFirst:
      return std::pow(s.q, gamma_fn(s.f, eff).value) * std::pow(s.a, eff.beta);
    case ModelKind::FeedbackAfter:
      return std::pow(s.q, eff.alpha) * std::pow(1.0 + s.f, eff.gamma2) *
             std::pow(s.a, eff.beta);
  }
  return 0.0;
}

double cost(const Strategy& s, const CostParams& c) {
  check_strategy(s);
  switch (s.model) {
    case ModelKind::Baseline:
      return s.q * c.c_query + s.q * s.a * c.c_assess;
    case ModelKind::FeedbackFirst:
      return s.q * c.c_query + s.q * s.f * c.c_feedback +
             s.q * s.a * c.c_assess;
    case ModelKind::FeedbackAfter:
      return s.q * c.c_query + s.q * s.f * c.c_feedback +
             s.q * (1.0 + s.f) * s.a * c.c_assess;
  }
  return 0.0;
}

Gradient gain_gradient(const Strategy& s, const EfficiencyParams& eff) {
  const double g = gain(s, eff);
  Gradient d;
  switch (s.model) {
    case ModelKind::Baseline:
      d.dq = eff.alpha * g / s.q;
      d.da = eff.beta * g / s.a;
      break;
    case ModelKind::FeedbackFirst:
      d.dq = gamma_fn(s.f, eff).value * g / s.q;
      d.df = eff.gamma1 * std::log(s.q) * g;
      d.da = eff.beta * g / s.a;
      break;
    case ModelKind::FeedbackAfter:
      d.dq = eff.alpha * g / s.q;
      d.df = eff.gamma2 * g / (1.0 + s.f);
      d.da = eff.beta * g / s.a;
      break;
  }
  return d;
}

Gradient cost_gradient(const Strategy& s, const CostParams& c) {
  check_strategy(s);
  Gradient d;
  switch (s.model) {
    case ModelKind::Baseline:
      d.dq = c.c_query + s.a * c.c_assess;
      d.da = s.q * c.c_assess;
      break;
    case ModelKind::FeedbackFirst:
      d.dq = c.c_query + s.f * c.c_feedback + s.a * c.c_assess;
      d.df = s.q * c.c_feedback;
      d.da = s.q * c.c_assess;
      break;
    case ModelKind::FeedbackAfter:
      d.dq = c.c_query + s.f * c.c_feedback + (1.0 + s.f) * s.a * c.c_assess;
      d.df = s.q * c.c_feedback + s.q * s.a * c.c_assess;
      d.da = s.q * (1.0 + s.f) * c.c_assess;
      break;
  }
  return d;
}

}  // namespace convecon
