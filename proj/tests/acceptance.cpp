// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any
// failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "convecon/closed_form.hpp"
#include "convecon/io.hpp"
#include "convecon/oracle.hpp"
#include "convecon/sessions.hpp"
#include "convecon/statics.hpp"
#include "helpers.hpp"

using namespace convecon;
using convecon::testing::make_params;
using convecon::testing::rel_diff;
using convecon::testing::run_cli;
using convecon::testing::slurp;
using convecon::testing::TempDir;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  return std::exp(u(rng));
}

ValidatedParams draw_params(std::mt19937_64& rng) {
  return make_params(log_uniform(rng, 0.5, 0.95), log_uniform(rng, 0.1, 0.45),
                     log_uniform(rng, 0.01, 0.3), log_uniform(rng, 0.05, 0.45),
                     log_uniform(rng, 2, 50), log_uniform(rng, 0.5, 10),
                     log_uniform(rng, 0.5, 5));
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

Outcome reduction() {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> ex(0.01, 1.0), g1(0.0, 1.0), cnt(0.0, 100.0);
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    const EfficiencyParams e{ex(rng), ex(rng), g1(rng), ex(rng)};
    const CostParams c{log_uniform(rng, 0.01, 100), log_uniform(rng, 0.01, 100),
                       log_uniform(rng, 0.01, 100)};
    const double q = cnt(rng), a = cnt(rng);
    const Strategy base{ModelKind::Baseline, q, 0, a};
    for (ModelKind m : {ModelKind::FeedbackFirst, ModelKind::FeedbackAfter}) {
      const Strategy s{m, q, 0, a};
      worst = std::max({worst, rel_diff(gain(s, e), gain(base, e)),
                        rel_diff(cost(s, c), cost(base, c))});
    }
  }
  return {worst <= 1e-12, "max rel diff " + fmt(worst) + " over 1000 draws"};
}

Outcome baseline_vs_closed_form() {
  std::mt19937_64 rng(2);
  double worst_a = 0, worst_kkt = 0;
  for (int i = 0; i < 50; ++i) {
    const auto p = draw_params(rng);
    const auto sol = minimize_cost(ModelKind::Baseline, p, GainTarget(100));
    worst_a = std::max(worst_a, rel_diff(sol.strategy.a, a0_star(p)));
    worst_kkt = std::max(worst_kkt, sol.kkt.residual_max);
  }
  return {worst_a <= 1e-3 && worst_kkt <= 1e-3,
          "max rel A error " + fmt(worst_a) + ", max KKT " + fmt(worst_kkt)};
}

Outcome expansion_path() {
  std::mt19937_64 rng(3);
  double worst = 0;
  for (int i = 0; i < 10; ++i) {
    const auto p = draw_params(rng);
    std::vector<double> as;
    for (double g : {10.0, 100.0, 1000.0})
      as.push_back(minimize_cost(ModelKind::Baseline, p, GainTarget(g)).strategy.a);
    const auto [lo, hi] = std::minmax_element(as.begin(), as.end());
    worst = std::max(worst, rel_diff(*lo, *hi));
  }
  return {worst < 1e-3, "max rel spread " + fmt(worst)};
}

Outcome feedback_after_printed_f() {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0;
  int found = 0, drawn = 0;
  while (found < 25 && drawn < 100000) {
    ++drawn;
    const double alpha = 0.5 + 0.45 * u(rng);
    const double beta = 0.05 + 0.4 * u(rng);
    const double gamma2 = beta + (alpha - beta) * u(rng);
    if (!(alpha > gamma2 && gamma2 > beta)) continue;
    const auto p = make_params(alpha, beta, 0.1, gamma2, log_uniform(rng, 2, 50),
                               log_uniform(rng, 0.5, 10), log_uniform(rng, 0.5, 5));
    const double raw = f2_star(p).raw;
    if (!(raw >= 0.1 && raw <= 100)) continue;
    try {
      const auto sol = minimize_cost(ModelKind::FeedbackAfter, p, GainTarget(100));
      worst = std::max(worst, rel_diff(sol.strategy.f, raw));
    } catch (const Unbounded&) {
      return {false, "oracle unbounded on an admissible instance"};
    }
    ++found;
  }
  return {found == 25 && worst <= 2e-2,
          std::to_string(found) + " instances, max rel F error " + fmt(worst)};
}

Outcome discrepancy_report(const TempDir& dir) {
  const auto path = dir.file("audit.json");
  const auto r = run_cli({"audit", "--samples", "1000", "--seed", "42", "--out", path});
  if (r.code != 0) return {false, "audit exited " + std::to_string(r.code) + ": " + r.err};
  const json doc = json::parse(slurp(path));
  bool m0_exact = true, verdicts = true;
  int m0 = 0, recorded = 0;
  for (const auto& c : doc.at("claims")) {
    const std::string model = c.at("model");
    if (model == "m0") {
      ++m0;
      m0_exact = m0_exact && c.at("fraction_holding_formula").is_number() &&
                 c.at("fraction_holding_formula").get<double>() == 1.0;
    }
    if (model == "m1" || c.at("provenance") == "draft") {
      const std::string v = c.at("verdict");
      const bool ok = (v == "AGREES" || v == "DISAGREES") &&
                      c.at("fraction_holding_formula").is_number() &&
                      c.at("fraction_holding_oracle").is_number();
      verdicts = verdicts && ok;
      recorded += ok;
    }
  }
  std::cout << r.out;
  return {m0 == 4 && m0_exact && verdicts,
          std::to_string(m0) + " baseline claims at 1.0: " + (m0_exact ? "yes" : "no") +
              ", verdicts recorded for " + std::to_string(recorded) +
              " feedback-first/draft claims"};
}

Outcome corner_behaviour() {
  bool ok = true;
  std::string detail;
  for (auto [cq, cf] : {std::pair{10.0, 2.0}, {50.0, 0.5}, {2.0, 10.0}}) {
    const auto p = make_params(0.8, 0.3, 0.1, 0.0, cq, cf, 1);
    const auto sol = minimize_cost(ModelKind::FeedbackAfter, p, GainTarget(100));
    const auto rec = viability(p, GainTarget(100));
    ok = ok && sol.strategy.f == 0.0 && !rec.feedback_after_worthwhile;
    if (!detail.empty()) detail += ", ";
    detail += "F=" + fmt(sol.strategy.f) +
              (rec.feedback_after_worthwhile ? " worthwhile" : " not worthwhile");
  }
  return {ok, detail};
}

Outcome estimation_round_trip() {
  const auto p = make_params(0.7, 0.4, 0.15, 0.5, 10, 2, 1);
  double exact = 0, noisy = 0;
  for (ModelKind m : kAllModels) {
    const double gamma = m == ModelKind::FeedbackFirst ? 0.15 : 0.5;
    const auto clean = fit_params(simulate_design(m, random_design(m, 60, 70), p, 0.0, 71));
    exact = std::max({exact, std::abs(*clean.alpha_hat - 0.7),
                      std::abs(*clean.beta_hat - 0.4), std::abs(*clean.cq_hat - 10),
                      std::abs(*clean.ca_hat - 1)});
    if (m != ModelKind::Baseline)
      exact = std::max({exact, std::abs(*clean.gamma_hat - gamma),
                        std::abs(*clean.cf_hat - 2)});
    const auto est = fit_gain_params(
        simulate_design(m, random_design(m, 500, 72), p, 0.05, 73), m);
    noisy = std::max({noisy, std::abs(*est.alpha_hat - 0.7), std::abs(*est.beta_hat - 0.4)});
    if (m != ModelKind::Baseline) noisy = std::max(noisy, std::abs(*est.gamma_hat - gamma));
  }
  return {exact <= 1e-9 && noisy <= 0.05,
          "noiseless max error " + fmt(exact) + ", sigma 0.05 max error " + fmt(noisy)};
}

Outcome determinism(const TempDir& dir) {
  const auto params = dir.write("p.json",
      R"({"alpha":0.85,"beta":0.3,"gamma1":0.1,"gamma2":0.4,"c_query":10,"c_feedback":2,"c_assess":1})");
  const std::vector<std::vector<std::string>> commands = {
      {"oracle", "--model", "m2", "--params", params, "--integer", "--out"},
      {"audit", "--samples", "200", "--seed", "42", "--out"},
      {"simulate", "--model", "m1", "--params", params, "--sigma", "0.1", "--n", "200",
       "--seed", "42", "--out"},
  };
  int identical = 0;
  for (std::size_t i = 0; i < commands.size(); ++i) {
    std::vector<std::string> first = commands[i], second = commands[i];
    first.push_back(dir.file("run" + std::to_string(i) + "a"));
    second.push_back(dir.file("run" + std::to_string(i) + "b"));
    const auto r1 = run_cli(first), r2 = run_cli(second);
    if (r1.code == 0 && r2.code == 0 && r1.out == r2.out &&
        slurp(first.back()) == slurp(second.back()) && !slurp(first.back()).empty())
      ++identical;
  }
  return {identical == 3, std::to_string(identical) + "/3 commands byte-identical"};
}

Outcome grammar_accounting() {
  const auto p = make_params(0.7, 0.4, 0.15, 0.5, 3.3, 1.7, 0.45);
  int exact = 0;
  for (ModelKind m : kAllModels) {
    const auto design = random_design(m, 100, 90);
    for (const SessionLog& log : simulate_design(m, design, p, 0.1, 91)) {
      const auto n = count_actions(log.actions);
      const auto q = static_cast<std::uint64_t>(log.strategy.q);
      const auto f = static_cast<std::uint64_t>(log.strategy.f);
      const auto a = static_cast<std::uint64_t>(log.strategy.a);
      const std::uint64_t assess = m == ModelKind::FeedbackAfter ? q * (1 + f) * a : q * a;
      exact += n.queries == q && n.feedbacks == q * f && n.assessments == assess &&
               log.realized_cost == cost(log.strategy, p) &&
               action_cost(log.actions, p.cost()) == log.realized_cost;
    }
  }
  return {exact == 300, std::to_string(exact) + "/300 sessions exact"};
}

}  // namespace

int main() {
  TempDir dir;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 reduction to the baseline", reduction},
      {"2 baseline oracle vs closed form", baseline_vs_closed_form},
      {"3 expansion path", expansion_path},
      {"4 feedback-after printed F vs oracle", feedback_after_printed_f},
      {"5 claim discrepancy report", [&] { return discrepancy_report(dir); }},
      {"6 no-benefit feedback corner", corner_behaviour},
      {"7 estimation round trip", estimation_round_trip},
      {"8 determinism", [&] { return determinism(dir); }},
      {"9 grammar accounting", grammar_accounting},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << name << "  ("
              << o.detail << "; " << fmt(secs) << " s)" << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
