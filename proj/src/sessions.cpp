#include "convecon/sessions.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <tuple>

namespace convecon {

std::string_view action_name(ActionKind k) {
  switch (k) {
    case ActionKind::Query: return "query";
    case ActionKind::Feedback: return "feedback";
    case ActionKind::Assess: return "assess";
  }
  return "query";
}

ActionKind parse_action(std::string_view name) {
  if (name == "query") return ActionKind::Query;
  if (name == "feedback") return ActionKind::Feedback;
  if (name == "assess") return ActionKind::Assess;
  throw DomainError("unknown action kind '" + std::string(name) + "'");
}

namespace {

void check_integer_strategy(const Strategy& s, ModelKind model) {
  check_strategy(s);
  if (s.model != model) throw DomainError("strategy model mismatch");
  if (!s.is_integral())
    throw DomainError("session strategies must be integer-valued");
}

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

std::string session_name(std::uint64_t index) {
  std::string digits = std::to_string(index);
  if (digits.size() < 6) digits.insert(0, 6 - digits.size(), '0');
  return "s" + digits;
}

}  // namespace

std::vector<SessionAction> unroll_actions(const Strategy& s, const CostParams& c) {
  check_strategy(s);
  if (!s.is_integral()) throw DomainError("strategy must be integer-valued");
  const auto q = static_cast<std::size_t>(s.q);
  const auto f = static_cast<std::size_t>(s.f);
  const auto a = static_cast<std::size_t>(s.a);

  std::vector<SessionAction> out;
  auto emit = [&](ActionKind k, std::size_t times) {
    const double unit = k == ActionKind::Query      ? c.c_query
                        : k == ActionKind::Feedback ? c.c_feedback
                                                    : c.c_assess;
    for (std::size_t i = 0; i < times; ++i) out.push_back({out.size(), k, unit});
  };
  for (std::size_t i = 0; i < q; ++i) {
    emit(ActionKind::Query, 1);
    switch (s.model) {
      case ModelKind::Baseline:
        emit(ActionKind::Assess, a);
        break;
      case ModelKind::FeedbackFirst:
        emit(ActionKind::Feedback, f);
        emit(ActionKind::Assess, a);
        break;
      case ModelKind::FeedbackAfter:
        emit(ActionKind::Assess, a);
        for (std::size_t r = 0; r < f; ++r) {
          emit(ActionKind::Feedback, 1);
          emit(ActionKind::Assess, a);
        }
        break;
    }
  }
  return out;
}

ActionCounts count_actions(const std::vector<SessionAction>& actions) {
  ActionCounts n;
  for (const auto& act : actions) {
    switch (act.kind) {
      case ActionKind::Query: ++n.queries; break;
      case ActionKind::Feedback: ++n.feedbacks; break;
      case ActionKind::Assess: ++n.assessments; break;
    }
  }
  return n;
}

double action_cost(const std::vector<SessionAction>& actions,
                   const CostParams& c) {
  const ActionCounts n = count_actions(actions);
  return static_cast<double>(n.queries) * c.c_query +
         static_cast<double>(n.feedbacks) * c.c_feedback +
         static_cast<double>(n.assessments) * c.c_assess;
}

std::vector<SessionLog> simulate_design(ModelKind model,
                                        const std::vector<Strategy>& design,
                                        const ValidatedParams& p, double sigma,
                                        std::uint64_t seed) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma))
    throw DomainError("sigma must be finite and >= 0");
  if (design.empty()) throw DomainError("need at least one session");
  for (const auto& s : design) check_integer_strategy(s, model);

  std::vector<SessionLog> logs(design.size());
  for (std::size_t i = 0; i < design.size(); ++i) {
    SessionLog& log = logs[i];
    log.session_id = session_name(i);
    log.model = model;
    log.strategy = design[i];
    log.stream_id = i;
    log.actions = unroll_actions(design[i], p.cost());
    log.realized_cost = action_cost(log.actions, p.cost());
    double noise = 1.0;
    if (sigma > 0.0) {
      auto rng = stream(seed, i);
      std::normal_distribution<double> eps(0.0, sigma);
      noise = std::exp(eps(rng));
    }
    log.realized_gain = gain(design[i], p) * noise;
  }
  return logs;
}

std::vector<SessionLog> simulate(ModelKind model, const Strategy& strategy,
                                 const ValidatedParams& p, double sigma,
                                 std::uint64_t seed, int n) {
  if (n < 1) throw DomainError("n must be >= 1");
  return simulate_design(model, std::vector<Strategy>(n, strategy), p, sigma,
                         seed);
}

std::vector<Strategy> random_design(ModelKind model, int n, std::uint64_t seed,
                                    int max_count) {
  if (n < 1) throw DomainError("n must be >= 1");
  if (max_count < 1) throw DomainError("max_count must be >= 1");
  // Draws use a stream disjoint from the noise streams of simulate_design.
  auto rng = stream(seed ^ 0x9e3779b97f4a7c15ULL, 0);
  const double span = std::log(static_cast<double>(max_count) + 1.0);
  auto draw = [&] {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return std::clamp(std::floor(std::exp(u * span)), 1.0,
                      static_cast<double>(max_count));
  };
  std::vector<Strategy> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    Strategy s{model, draw(), 0.0, 0.0};
    s.f = model == ModelKind::Baseline ? 0.0 : draw();
    s.a = draw();
    out.push_back(s);
  }
  return out;
}

namespace {

struct LeastSquares {
  Eigen::VectorXd coef;
  double rms = 0.0;
  bool rank_deficient = false;
  std::vector<int> unidentified;
};

// Normal equations on column-scaled regressors; the SVD supplies the rank
// check and, for deficient designs, the null-space coefficients.
LeastSquares solve_least_squares(const Eigen::MatrixXd& x,
                                 const Eigen::VectorXd& y) {
  constexpr double kRankTol = 1e-8;
  LeastSquares out;
  const Eigen::VectorXd norms = x.colwise().norm().transpose();
  Eigen::VectorXd scale = norms;
  for (Eigen::Index j = 0; j < scale.size(); ++j)
    if (scale(j) == 0.0) scale(j) = 1.0;
  const Eigen::MatrixXd xs = x * scale.cwiseInverse().asDiagonal();

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(xs, Eigen::ComputeThinV);
  const Eigen::VectorXd sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    if (smax > 0.0 && sv(k) >= kRankTol * smax) continue;
    out.rank_deficient = true;
    const Eigen::VectorXd v = svd.matrixV().col(k);
    for (Eigen::Index j = 0; j < v.size(); ++j)
      if (std::abs(v(j)) > 1e-6) out.unidentified.push_back(static_cast<int>(j));
  }
  std::sort(out.unidentified.begin(), out.unidentified.end());
  out.unidentified.erase(
      std::unique(out.unidentified.begin(), out.unidentified.end()),
      out.unidentified.end());

  Eigen::VectorXd bs;
  if (!out.rank_deficient) {
    const Eigen::MatrixXd normal = xs.transpose() * xs;
    bs = normal.ldlt().solve(xs.transpose() * y);
  } else {
    bs = xs.completeOrthogonalDecomposition().solve(y);
  }
  out.coef = bs.cwiseQuotient(scale);
  const Eigen::VectorXd r = y - x * out.coef;
  out.rms = std::sqrt(r.squaredNorm() / static_cast<double>(y.size()));
  return out;
}

ModelKind shared_model(const std::vector<SessionLog>& logs) {
  if (logs.empty()) throw DomainError("no sessions to fit");
  const ModelKind m = logs.front().model;
  for (const auto& l : logs)
    if (l.model != m) throw DomainError("logs must share one model");
  return m;
}

std::size_t distinct_designs(const std::vector<SessionLog>& logs) {
  std::set<std::tuple<double, double, double>> pts;
  for (const auto& l : logs)
    pts.emplace(l.strategy.q, l.strategy.f, l.strategy.a);
  return pts.size();
}

void require_design(const std::vector<SessionLog>& logs, std::size_t coefs) {
  const std::size_t distinct = distinct_designs(logs);
  if (distinct < coefs)
    throw InsufficientDesign("need at least " + std::to_string(coefs) +
                             " distinct design points, got " +
                             std::to_string(distinct));
}

}  // namespace

EstimationResult fit_gain_params(const std::vector<SessionLog>& logs,
                                 ModelKind model) {
  if (shared_model(logs) != model) throw DomainError("logs must share one model");
  const std::size_t k = model == ModelKind::Baseline ? 2 : 3;
  require_design(logs, k);

  const auto n = static_cast<Eigen::Index>(logs.size());
  Eigen::MatrixXd x(n, static_cast<Eigen::Index>(k));
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& l = logs[i];
    const Strategy& s = l.strategy;
    if (!(s.q >= 1.0 && s.a >= 1.0) || (model != ModelKind::Baseline && !(s.f >= 1.0)))
      throw DomainError("gain fitting needs every count >= 1");
    if (!(l.realized_gain > 0.0))
      throw DomainError("realized gain must be > 0");
    const double lq = std::log(s.q);
    const double la = std::log(s.a);
    y(i) = std::log(l.realized_gain);
    switch (model) {
      case ModelKind::Baseline:
        x.row(i) << lq, la;
        break;
      case ModelKind::FeedbackFirst:
        x.row(i) << lq, s.f * lq, la;
        break;
      case ModelKind::FeedbackAfter:
        x.row(i) << lq, std::log1p(s.f), la;
        break;
    }
  }
  const LeastSquares ls = solve_least_squares(x, y);

  EstimationResult r;
  r.model = model;
  r.n_sessions = logs.size();
  r.residual_rms = ls.rms;
  r.condition_warning = ls.rank_deficient;
  const char* gamma = model == ModelKind::FeedbackFirst ? "gamma1" : "gamma2";
  std::vector<std::string> names;
  if (model == ModelKind::Baseline) {
    r.alpha_hat = ls.coef(0);
    r.beta_hat = ls.coef(1);
    names = {"alpha", "beta"};
  } else {
    r.alpha_hat = ls.coef(0);
    r.gamma_hat = ls.coef(1);
    r.beta_hat = ls.coef(2);
    names = {"alpha", gamma, "beta"};
  }
  for (int j : ls.unidentified) r.unidentified.push_back(names[j]);
  return r;
}

EstimationResult fit_cost_params(const std::vector<SessionLog>& logs) {
  const ModelKind model = shared_model(logs);
  const std::size_t k = model == ModelKind::Baseline ? 2 : 3;
  require_design(logs, k);

  const auto n = static_cast<Eigen::Index>(logs.size());
  Eigen::MatrixXd x(n, static_cast<Eigen::Index>(k));
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Strategy& s = logs[i].strategy;
    y(i) = logs[i].realized_cost;
    switch (model) {
      case ModelKind::Baseline:
        x.row(i) << s.q, s.q * s.a;
        break;
      case ModelKind::FeedbackFirst:
        x.row(i) << s.q, s.q * s.f, s.q * s.a;
        break;
      case ModelKind::FeedbackAfter:
        x.row(i) << s.q, s.q * s.f, s.q * (1.0 + s.f) * s.a;
        break;
    }
  }
  const LeastSquares ls = solve_least_squares(x, y);

  EstimationResult r;
  r.model = model;
  r.n_sessions = logs.size();
  r.cost_residual_rms = ls.rms;
  r.condition_warning = ls.rank_deficient;
  std::vector<std::string> names;
  if (model == ModelKind::Baseline) {
    r.cq_hat = ls.coef(0);
    r.ca_hat = ls.coef(1);
    names = {"c_query", "c_assess"};
  } else {
    r.cq_hat = ls.coef(0);
    r.cf_hat = ls.coef(1);
    r.ca_hat = ls.coef(2);
    names = {"c_query", "c_feedback", "c_assess"};
  }
  for (int j : ls.unidentified) r.unidentified.push_back(names[j]);
  for (Eigen::Index j = 0; j < ls.coef.size(); ++j)
    if (ls.coef(j) < 0.0) r.condition_warning = true;
  return r;
}

EstimationResult fit_params(const std::vector<SessionLog>& logs) {
  const ModelKind model = shared_model(logs);
  EstimationResult r = fit_gain_params(logs, model);
  const EstimationResult c = fit_cost_params(logs);
  r.cq_hat = c.cq_hat;
  r.cf_hat = c.cf_hat;
  r.ca_hat = c.ca_hat;
  r.cost_residual_rms = c.cost_residual_rms;
  r.condition_warning = r.condition_warning || c.condition_warning;
  r.unidentified.insert(r.unidentified.end(), c.unidentified.begin(),
                        c.unidentified.end());
  return r;
}

Recommendation viability(const ValidatedParams& p, const GainTarget& g,
                         const GridSpec& grid) {
  constexpr double kRel = 1e-6;
  Recommendation rec;
  for (ModelKind m : kAllModels) {
    ModelOutcome o;
    o.model = m;
    try {
      o.optimum = minimize_cost(m, p, g, grid);
      o.comparable = true;
    } catch (const Unbounded& e) {
      o.note = e.what();
    }
    rec.outcomes.push_back(std::move(o));
  }

  // Models are visited simplest first; a later model must undercut by more
  // than the tolerance to take over.
  const ModelOutcome* best = nullptr;
  for (const auto& o : rec.outcomes) {
    if (!o.comparable) continue;
    if (!best || o.optimum->total_cost < best->optimum->total_cost * (1.0 - kRel))
      best = &o;
  }
  if (best) rec.cheapest = best->model;

  const ModelOutcome& base = rec.outcomes[0];
  auto worthwhile = [&](const ModelOutcome& o) {
    return o.comparable && base.comparable && o.optimum->strategy.f > 0.0 &&
           o.optimum->total_cost < base.optimum->total_cost * (1.0 - kRel);
  };
  rec.feedback_first_worthwhile = worthwhile(rec.outcomes[1]);
  rec.feedback_after_worthwhile = worthwhile(rec.outcomes[2]);
  return rec;
}

}  // namespace convecon
