#pragma once

#include <array>
#include <string>
#include <string_view>

#include "convecon/errors.hpp"

namespace convecon {

/// Exponents of the production functions.
///
/// `alpha` and `beta` weight querying and assessing, `gamma1` is the
/// per-round increment of the query exponent under Feedback First and
/// `gamma2` the exponent of (1 + F) under Feedback After.
struct EfficiencyParams {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
};

/// Unit costs of one query, one feedback round and one assessed item.
struct CostParams {
  double c_query = 0.0;
  double c_feedback = 0.0;
  double c_assess = 0.0;
};

enum class ModelKind { Baseline, FeedbackFirst, FeedbackAfter };

inline constexpr std::array<ModelKind, 3> kAllModels = {
    ModelKind::Baseline, ModelKind::FeedbackFirst, ModelKind::FeedbackAfter};

/// Short tag used in files and on the command line: m0, m1, m2.
std::string_view model_tag(ModelKind model);
ModelKind parse_model_tag(std::string_view tag);

/// A point (Q, F, A). Counts are continuous; F is per query, A is per query
/// (Baseline, FeedbackFirst) or per query/feedback round (FeedbackAfter).
struct Strategy {
  ModelKind model = ModelKind::Baseline;
  double q = 0.0;
  double f = 0.0;
  double a = 0.0;

  bool is_integral() const;
  friend bool operator==(const Strategy&, const Strategy&) = default;
};

/// Throws DomainError when a count is negative or non-finite, or when a
/// Baseline strategy carries feedback.
void check_strategy(const Strategy& s);

/// Strictly positive, finite gain level.
class GainTarget {
 public:
  explicit GainTarget(double g);
  double value() const noexcept { return g_; }

 private:
  double g_;
};

/// Efficiency and cost parameters that passed `validate`. Every downstream
/// operation takes this type, so unchecked parameters cannot reach them.
class ValidatedParams {
 public:
  const EfficiencyParams& eff() const noexcept { return eff_; }
  const CostParams& cost() const noexcept { return cost_; }

 private:
  ValidatedParams(const EfficiencyParams& eff, const CostParams& cost)
      : eff_(eff), cost_(cost) {}
  friend ValidatedParams validate(const EfficiencyParams&, const CostParams&);

  EfficiencyParams eff_;
  CostParams cost_;
};

/// Checks 0 < alpha, beta <= 1; gamma1 >= 0; 0 <= gamma2 <= 1; unit costs
/// strictly positive and finite. Throws DomainError naming the field.
ValidatedParams validate(const EfficiencyParams& eff, const CostParams& cost);

/// Query exponent under Feedback First.
struct GammaValue {
  double value;
  bool super_linear;  // value > 1
};

GammaValue gamma_fn(double f, const EfficiencyParams& eff);

/// Exponent applied to Q by the given model at feedback level f.
double query_exponent(ModelKind model, double f, const EfficiencyParams& eff);

double gain(const Strategy& s, const EfficiencyParams& eff);
double cost(const Strategy& s, const CostParams& cost);

inline double gain(const Strategy& s, const ValidatedParams& p) {
  return gain(s, p.eff());
}
inline double cost(const Strategy& s, const ValidatedParams& p) {
  return cost(s, p.cost());
}

/// Analytic partial derivatives with respect to (Q, F, A).
struct Gradient {
  double dq = 0.0;
  double df = 0.0;
  double da = 0.0;
};

Gradient gain_gradient(const Strategy& s, const EfficiencyParams& eff);
Gradient cost_gradient(const Strategy& s, const CostParams& cost);

}  // namespace convecon
