#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "convecon/io.hpp"
#include "convecon/sessions.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace convecon;
using convecon::testing::make_params;

namespace {

std::vector<ActionKind> kinds(const std::vector<SessionAction>& actions) {
  std::vector<ActionKind> out;
  for (const auto& a : actions) out.push_back(a.kind);
  return out;
}

constexpr auto Qk = ActionKind::Query;
constexpr auto Fk = ActionKind::Feedback;
constexpr auto Ak = ActionKind::Assess;

}  // namespace

TEST_CASE("action grammar examples") {
  const CostParams c{10, 2, 1};
  const auto base = unroll_actions(Strategy{ModelKind::Baseline, 2, 0, 3}, c);
  CHECK(kinds(base) == std::vector{Qk, Ak, Ak, Ak, Qk, Ak, Ak, Ak});

  const auto after = unroll_actions(Strategy{ModelKind::FeedbackAfter, 1, 2, 2}, c);
  CHECK(kinds(after) == std::vector{Qk, Ak, Ak, Fk, Ak, Ak, Fk, Ak, Ak});
  CHECK(count_actions(after).feedbacks == 2);

  const auto first = unroll_actions(Strategy{ModelKind::FeedbackFirst, 1, 2, 2}, c);
  CHECK(kinds(first) == std::vector{Qk, Fk, Fk, Ak, Ak});

  for (std::size_t i = 0; i < after.size(); ++i) CHECK(after[i].step == i);
  CHECK(after[0].unit_cost == 10.0);
  CHECK(after[3].unit_cost == 2.0);
  CHECK(after[1].unit_cost == 1.0);

  CHECK_THROWS_AS(unroll_actions(Strategy{ModelKind::Baseline, 1.5, 0, 3}, c),
                  DomainError);
}

TEST_CASE("action names round-trip") {
  for (ActionKind k : {Qk, Fk, Ak}) CHECK(parse_action(action_name(k)) == k);
  CHECK(action_name(Qk) == "query");
  CHECK_THROWS_AS(parse_action("click"), DomainError);
}

TEST_CASE("simulate without noise reproduces gain and cost") {
  const auto p = make_params(0.7, 0.4, 0.1, 0.5, 10, 2, 1);
  const Strategy s{ModelKind::FeedbackAfter, 3, 2, 4};
  const auto logs = simulate(ModelKind::FeedbackAfter, s, p, 0.0, 1, 5);
  REQUIRE(logs.size() == 5);
  for (const auto& l : logs) {
    CHECK(l.realized_gain == gain(s, p));
    CHECK(l.realized_cost == cost(s, p));
    CHECK(l.strategy == s);
  }
  CHECK(logs[0].session_id == "s000000");
  CHECK(logs[4].session_id == "s000004");
  CHECK(logs[0].stream_id != logs[1].stream_id);
}

TEST_CASE("simulate input checks") {
  const auto p = make_params(0.7, 0.4, 0.1, 0.5, 10, 2, 1);
  const Strategy s{ModelKind::Baseline, 3, 0, 4};
  CHECK_THROWS_AS(simulate(ModelKind::Baseline, Strategy{ModelKind::Baseline, 3, 0, 4.5},
                           p, 0, 1, 1),
                  DomainError);
  CHECK_THROWS_AS(simulate(ModelKind::Baseline, s, p, -0.1, 1, 1), DomainError);
  CHECK_THROWS_AS(simulate(ModelKind::Baseline, s, p, 0, 1, 0), DomainError);
  CHECK_THROWS_AS(simulate(ModelKind::FeedbackAfter, s, p, 0, 1, 1), DomainError);
}

TEST_CASE("noisy simulation is deterministic per seed") {
  const auto p = make_params(0.7, 0.4, 0.1, 0.5, 10, 2, 1);
  const Strategy s{ModelKind::FeedbackFirst, 2, 1, 3};
  const auto x = simulate(ModelKind::FeedbackFirst, s, p, 0.1, 9, 20);
  const auto y = simulate(ModelKind::FeedbackFirst, s, p, 0.1, 9, 20);
  const auto z = simulate(ModelKind::FeedbackFirst, s, p, 0.1, 10, 20);
  std::ostringstream ox, oy;
  io::write_jsonl(ox, x);
  io::write_jsonl(oy, y);
  CHECK(ox.str() == oy.str());
  CHECK(x[0].realized_gain != z[0].realized_gain);
  // A session's draw does not depend on how many sessions are generated.
  CHECK(simulate(ModelKind::FeedbackFirst, s, p, 0.1, 9, 3)[2].realized_gain ==
        x[2].realized_gain);
}

TEST_CASE("random designs") {
  const auto d = random_design(ModelKind::Baseline, 200, 3);
  REQUIRE(d.size() == 200);
  for (const Strategy& s : d) {
    CHECK(s.f == 0.0);
    CHECK(s.q >= 1);
    CHECK(s.q <= 32);
    CHECK(s.is_integral());
  }
  CHECK(random_design(ModelKind::FeedbackAfter, 50, 3) ==
        random_design(ModelKind::FeedbackAfter, 50, 3));
}

TEST_CASE("property: grammar accounting matches the cost formulas exactly") {
  const auto p = make_params(0.7, 0.4, 0.1, 0.5, 3.7, 1.3, 0.9);
  for (ModelKind m : kAllModels) {
    for (const Strategy& s : random_design(m, 100, 21, 12)) {
      const auto actions = unroll_actions(s, p.cost());
      const auto n = count_actions(actions);
      const auto q = static_cast<std::uint64_t>(s.q);
      const auto f = static_cast<std::uint64_t>(s.f);
      const auto a = static_cast<std::uint64_t>(s.a);
      CHECK(n.queries == q);
      CHECK(n.feedbacks == q * f);
      CHECK(n.assessments == (m == ModelKind::FeedbackAfter ? q * (1 + f) * a : q * a));
      CHECK(action_cost(actions, p.cost()) == cost(s, p));
    }
  }
}

TEST_CASE("noiseless round trip recovers every parameter") {
  const auto p = make_params(0.7, 0.4, 0.15, 0.5, 10, 2, 1);
  for (ModelKind m : kAllModels) {
    const auto logs = simulate_design(m, random_design(m, 60, 4), p, 0.0, 8);
    const auto r = fit_params(logs);
    CHECK(std::abs(*r.alpha_hat - 0.7) <= 1e-9);
    CHECK(std::abs(*r.beta_hat - 0.4) <= 1e-9);
    CHECK(std::abs(*r.cq_hat - 10) <= 1e-9);
    CHECK(std::abs(*r.ca_hat - 1) <= 1e-9);
    CHECK(r.residual_rms <= 1e-12);
    CHECK_FALSE(r.condition_warning);
    CHECK(r.n_sessions == 60);
    if (m == ModelKind::Baseline) {
      CHECK_FALSE(r.gamma_hat.has_value());
      CHECK_FALSE(r.cf_hat.has_value());
    } else {
      const double g = m == ModelKind::FeedbackFirst ? 0.15 : 0.5;
      CHECK(std::abs(*r.gamma_hat - g) <= 1e-9);
      CHECK(std::abs(*r.cf_hat - 2) <= 1e-9);
    }
  }
}

TEST_CASE("noisy estimates stay within 0.05 of the truth") {
  const auto p = make_params(0.7, 0.4, 0.15, 0.5, 10, 2, 1);
  for (ModelKind m : kAllModels) {
    const auto logs = simulate_design(m, random_design(m, 500, 31), p, 0.05, 32);
    const auto r = fit_gain_params(logs, m);
    CHECK(std::abs(*r.alpha_hat - 0.7) <= 0.05);
    CHECK(std::abs(*r.beta_hat - 0.4) <= 0.05);
    if (m != ModelKind::Baseline)
      CHECK(std::abs(*r.gamma_hat - (m == ModelKind::FeedbackFirst ? 0.15 : 0.5)) <= 0.05);
    CHECK(r.residual_rms > 0.0);
  }
}

TEST_CASE("estimation error paths") {
  const auto p = make_params(0.7, 0.4, 0.15, 0.5, 10, 2, 1);
  const Strategy s{ModelKind::FeedbackAfter, 3, 2, 4};
  const auto same = simulate(ModelKind::FeedbackAfter, s, p, 0.0, 1, 10);
  CHECK_THROWS_AS(fit_gain_params(same, ModelKind::FeedbackAfter), InsufficientDesign);
  CHECK_THROWS_AS(fit_cost_params(same), InsufficientDesign);

  auto mixed = simulate(ModelKind::Baseline, Strategy{ModelKind::Baseline, 2, 0, 2}, p, 0, 1, 2);
  mixed.push_back(same[0]);
  try {
    fit_cost_params(mixed);
    FAIL("expected DomainError");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()) == "logs must share one model");
  }
  CHECK_THROWS_AS(fit_gain_params(same, ModelKind::Baseline), DomainError);
  CHECK_THROWS_AS(fit_cost_params({}), DomainError);
}

TEST_CASE("collinear feedback columns are flagged") {
  const auto p = make_params(0.7, 0.4, 0.15, 0.5, 10, 2, 1);
  std::vector<Strategy> design;
  for (int q = 1; q <= 4; ++q)
    for (int a = 1; a <= 4; ++a) design.push_back({ModelKind::FeedbackFirst, double(q), 3, double(a)});
  const auto logs = simulate_design(ModelKind::FeedbackFirst, design, p, 0.0, 2);
  const auto c = fit_cost_params(logs);
  CHECK(c.condition_warning);
  CHECK(std::find(c.unidentified.begin(), c.unidentified.end(), "c_query") !=
        c.unidentified.end());
  CHECK(std::find(c.unidentified.begin(), c.unidentified.end(), "c_feedback") !=
        c.unidentified.end());
  CHECK(std::find(c.unidentified.begin(), c.unidentified.end(), "c_assess") ==
        c.unidentified.end());
  CHECK(*c.ca_hat == doctest::Approx(1.0));
  // The identified combination is still exact.
  CHECK(*c.cq_hat + 3 * *c.cf_hat == doctest::Approx(16.0));
}

TEST_CASE("viability") {
  SUBCASE("no feedback benefit keeps the baseline") {
    const auto p = make_params(0.9, 0.3, 0.0, 0.0, 10, 2, 1);
    const auto r = viability(p, GainTarget(100));
    REQUIRE(r.cheapest.has_value());
    CHECK(*r.cheapest == ModelKind::Baseline);
    CHECK_FALSE(r.feedback_first_worthwhile);
    CHECK_FALSE(r.feedback_after_worthwhile);
    CHECK(r.outcomes[2].optimum->strategy.f == 0.0);
  }
  SUBCASE("cheap, effective feedback after a query pays off") {
    const auto p = make_params(0.6, 0.3, 0.0, 0.5, 20, 0.5, 1);
    const auto r = viability(p, GainTarget(100));
    CHECK(r.feedback_after_worthwhile);
    CHECK(r.outcomes[2].optimum->strategy.f > 0.0);
    CHECK(r.outcomes[2].optimum->total_cost < r.outcomes[0].optimum->total_cost);
  }
  SUBCASE("unbounded models are not comparable") {
    const auto p = make_params(0.3, 0.5, 0.1, 0.2, 10, 2, 1);
    const auto r = viability(p, GainTarget(100));
    CHECK_FALSE(r.outcomes[0].comparable);
    CHECK_FALSE(r.outcomes[0].note.empty());
    CHECK_FALSE(r.feedback_after_worthwhile);
  }
}

TEST_CASE("property: viability never recommends a model without feedback") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 10; ++i) {
    const auto p = make_params(0.5 + 0.45 * u(rng), 0.1 + 0.3 * u(rng), 0.3 * u(rng),
                               0.45 * u(rng), 2 + 40 * u(rng), 0.5 + 5 * u(rng),
                               0.5 + 3 * u(rng));
    const auto r = viability(p, GainTarget(100), GridSpec{1e-3, 1e4, 80, 4});
    if (r.feedback_first_worthwhile) CHECK(r.outcomes[1].optimum->strategy.f > 0.0);
    if (r.feedback_after_worthwhile) CHECK(r.outcomes[2].optimum->strategy.f > 0.0);
  }
}

TEST_CASE("session logs round-trip through JSON Lines") {
  const auto p = make_params(0.7, 0.4, 0.15, 0.5, 10, 2, 1);
  const auto logs = simulate(ModelKind::FeedbackAfter, Strategy{ModelKind::FeedbackAfter, 2, 1, 2},
                             p, 0.2, 5, 3);
  std::stringstream ss;
  io::write_jsonl(ss, logs);
  const auto back = io::read_jsonl(ss);
  REQUIRE(back.size() == logs.size());
  for (std::size_t i = 0; i < logs.size(); ++i) {
    CHECK(back[i].session_id == logs[i].session_id);
    CHECK(back[i].strategy == logs[i].strategy);
    CHECK(back[i].realized_gain == logs[i].realized_gain);
    CHECK(back[i].realized_cost == logs[i].realized_cost);
    CHECK(back[i].actions.size() == logs[i].actions.size());
  }
  std::stringstream bad(R"({"session_id":"s0","model":"m0","q":1,"f":0,"a":1,)"
                        R"("realized_gain":1,"realized_cost":2,"actions":[{"step":1,"kind":"query","unit_cost":1}]})");
  CHECK_THROWS_AS(io::read_jsonl(bad), DomainError);
}
