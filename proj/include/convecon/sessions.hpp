#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "convecon/model.hpp"
#include "convecon/oracle.hpp"

namespace convecon {

enum class ActionKind { Query, Feedback, Assess };

std::string_view action_name(ActionKind k);
ActionKind parse_action(std::string_view name);

struct SessionAction {
  std::size_t step = 0;
  ActionKind kind = ActionKind::Query;
  double unit_cost = 0.0;
};

struct SessionLog {
  std::string session_id;
  ModelKind model = ModelKind::Baseline;
  Strategy strategy;  // integer-valued
  std::vector<SessionAction> actions;
  double realized_gain = 0.0;
  double realized_cost = 0.0;
  std::uint64_t stream_id = 0;
};

/// Action sequence of one session:
///   Baseline       per query: Query, A x Assess
///   FeedbackFirst  per query: Query, F x Feedback, A x Assess
///   FeedbackAfter  per query: Query, A x Assess, F x (Feedback, A x Assess)
std::vector<SessionAction> unroll_actions(const Strategy& s, const CostParams& c);

struct ActionCounts {
  std::uint64_t queries = 0;
  std::uint64_t feedbacks = 0;
  std::uint64_t assessments = 0;
};

ActionCounts count_actions(const std::vector<SessionAction>& actions);

/// Total cost of an action list, aggregated per kind so that it reproduces
/// `cost(strategy)` bit for bit.
double action_cost(const std::vector<SessionAction>& actions,
                   const CostParams& c);

/// n sessions of one integer strategy. Gain is noised by exp(eps),
/// eps ~ Normal(0, sigma^2), drawn from a stream derived from (seed, index).
std::vector<SessionLog> simulate(ModelKind model, const Strategy& strategy,
                                 const ValidatedParams& p, double sigma,
                                 std::uint64_t seed, int n);

/// One session per design point; session i uses design[i].
std::vector<SessionLog> simulate_design(ModelKind model,
                                        const std::vector<Strategy>& design,
                                        const ValidatedParams& p, double sigma,
                                        std::uint64_t seed);

/// n integer strategies with counts drawn log-uniformly from {1..max_count}
/// (f fixed at 0 for the baseline).
std::vector<Strategy> random_design(ModelKind model, int n, std::uint64_t seed,
                                    int max_count = 32);

struct EstimationResult {
  ModelKind model = ModelKind::Baseline;
  std::optional<double> alpha_hat;
  std::optional<double> beta_hat;
  std::optional<double> gamma_hat;  // gamma1 (m1) or gamma2 (m2)
  std::optional<double> cq_hat;
  std::optional<double> cf_hat;
  std::optional<double> ca_hat;
  double residual_rms = 0.0;       // log-gain residuals
  double cost_residual_rms = 0.0;  // cost residuals
  std::size_t n_sessions = 0;
  bool condition_warning = false;
  std::vector<std::string> unidentified;  // coefficients in the design null space
};

/// Least squares in log space on the model's linear-in-parameters form.
/// Throws InsufficientDesign when distinct design points < coefficients.
EstimationResult fit_gain_params(const std::vector<SessionLog>& logs,
                                 ModelKind model);

/// Least squares of realized cost on the model's count regressors. Negative
/// estimates are returned as-is with condition_warning set.
EstimationResult fit_cost_params(const std::vector<SessionLog>& logs);

/// Both fits merged into one result.
EstimationResult fit_params(const std::vector<SessionLog>& logs);

struct ModelOutcome {
  ModelKind model = ModelKind::Baseline;
  bool comparable = false;  // false when the oracle reported Unbounded
  std::optional<OptimalStrategy> optimum;
  std::string note;
};

struct Recommendation {
  std::vector<ModelOutcome> outcomes;  // m0, m1, m2
  std::optional<ModelKind> cheapest;
  bool feedback_first_worthwhile = false;
  bool feedback_after_worthwhile = false;
};

/// Oracle optimum of every model at the same (params, G). A feedback model is
/// worthwhile iff its optimal F > 0 and its optimal cost undercuts the
/// baseline by more than 1e-6 relative. Costs within 1e-6 of each other
/// resolve to the simpler model.
Recommendation viability(const ValidatedParams& p, const GainTarget& g,
                         const GridSpec& grid = {});

}  // namespace convecon
