#include "convecon/statics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <random>
#include <tuple>

#include "convecon/closed_form.hpp"

namespace convecon {

namespace {

struct ParameterInfo {
  Parameter p;
  std::string_view name;
};

constexpr std::array<ParameterInfo, 9> kParameters = {{
    {Parameter::Alpha, "alpha"},
    {Parameter::Beta, "beta"},
    {Parameter::Gamma1, "gamma1"},
    {Parameter::Gamma2, "gamma2"},
    {Parameter::CQuery, "c_query"},
    {Parameter::CFeedback, "c_feedback"},
    {Parameter::CAssess, "c_assess"},
    {Parameter::Rounds, "f"},
    {Parameter::Assessments, "a"},
}};

}  // namespace

std::string_view parameter_name(Parameter p) {
  for (const auto& info : kParameters)
    if (info.p == p) return info.name;
  return "?";
}

Parameter parse_parameter(std::string_view name) {
  for (const auto& info : kParameters)
    if (info.name == name) return info.p;
  throw DomainError("unknown parameter '" + std::string(name) + "'");
}

double get(const StaticsPoint& pt, Parameter p) {
  switch (p) {
    case Parameter::Alpha: return pt.eff.alpha;
    case Parameter::Beta: return pt.eff.beta;
    case Parameter::Gamma1: return pt.eff.gamma1;
    case Parameter::Gamma2: return pt.eff.gamma2;
    case Parameter::CQuery: return pt.cost.c_query;
    case Parameter::CFeedback: return pt.cost.c_feedback;
    case Parameter::CAssess: return pt.cost.c_assess;
    case Parameter::Rounds: return pt.f;
    case Parameter::Assessments: return pt.a;
  }
  return 0.0;
}

StaticsPoint with(StaticsPoint pt, Parameter p, double v) {
  switch (p) {
    case Parameter::Alpha: pt.eff.alpha = v; break;
    case Parameter::Beta: pt.eff.beta = v; break;
    case Parameter::Gamma1: pt.eff.gamma1 = v; break;
    case Parameter::Gamma2: pt.eff.gamma2 = v; break;
    case Parameter::CQuery: pt.cost.c_query = v; break;
    case Parameter::CFeedback: pt.cost.c_feedback = v; break;
    case Parameter::CAssess: pt.cost.c_assess = v; break;
    case Parameter::Rounds: pt.f = v; break;
    case Parameter::Assessments: pt.a = v; break;
  }
  return pt;
}

char sign_char(Sign s) {
  switch (s) {
    case Sign::Negative: return '-';
    case Sign::Positive: return '+';
    case Sign::Flat: return '0';
  }
  return '0';
}

namespace {

void check_point(const StaticsPoint& pt) {
  validate(pt.eff, pt.cost);
  if (!(pt.f >= 0.0) || !std::isfinite(pt.f)) throw DomainError("f must be >= 0");
  if (!(pt.a > 0.0) || !std::isfinite(pt.a)) throw DomainError("a must be > 0");
}

}  // namespace

SignResult finite_diff_sign(const QuantityFn& quantity, Parameter parameter,
                            const StaticsPoint& at, double h, double flat) {
  if (!(h > 0.0)) throw DomainError("h must be > 0");
  const double x = get(at, parameter);
  const double dx = h * std::abs(x);
  if (!(dx > 0.0)) throw DomainError("cannot perturb a zero-valued parameter");
  const StaticsPoint up = with(at, parameter, x + dx);
  const StaticsPoint down = with(at, parameter, x - dx);
  check_point(up);
  check_point(down);

  const Evaluation hi = quantity(up);
  const Evaluation lo = quantity(down);
  SignResult r;
  r.derivative = (hi.value - lo.value) / (2.0 * dx);
  if (hi.corner || lo.corner) {
    r.censored = true;
    return r;
  }
  if (std::abs(r.derivative) < flat) return r;
  r.sign = r.derivative > 0.0 ? Sign::Positive : Sign::Negative;
  return r;
}

std::string_view quantity_name(Quantity q) {
  return q == Quantity::AStar ? "AStar" : "FStar";
}

std::string_view formula_name(FormulaVariant v) {
  switch (v) {
    case FormulaVariant::A0: return "a0_star";
    case FormulaVariant::A1: return "a1_star";
    case FormulaVariant::F1: return "f1_star";
    case FormulaVariant::A2Partial: return "a2_star_partial";
    case FormulaVariant::A2Full: return "a2_star_full";
    case FormulaVariant::F2: return "f2_star";
    case FormulaVariant::F2Draft: return "f2_star_draft";
  }
  return "?";
}

std::string_view provenance_name(Provenance p) {
  return p == Provenance::Published ? "published" : "draft";
}

const std::vector<Claim>& claim_registry() {
  using M = ModelKind;
  using Q = Quantity;
  using V = FormulaVariant;
  using P = Parameter;
  constexpr auto pub = Provenance::Published;
  constexpr auto draft = Provenance::Draft;
  constexpr auto up = Sign::Positive;
  constexpr auto down = Sign::Negative;
  static const std::vector<Claim> registry = {
      {"M0-1", M::Baseline, Q::AStar, V::A0, P::CQuery, up, "users should assess more items", pub},
      {"M0-2", M::Baseline, Q::AStar, V::A0, P::CAssess, down, "assess fewer items per query", pub},
      {"M0-3", M::Baseline, Q::AStar, V::A0, P::Alpha, down, "users should assess fewer items", pub},
      {"M0-4", M::Baseline, Q::AStar, V::A0, P::Beta, up, "the users should assess more", pub},
      {"M1-1", M::FeedbackFirst, Q::AStar, V::A1, P::CQuery, up, "if $C_q$ increases", pub},
      {"M1-2", M::FeedbackFirst, Q::AStar, V::A1, P::CAssess, down, "If $C_a$ increases", pub},
      {"M1-3", M::FeedbackFirst, Q::AStar, V::A1, P::CFeedback, up, "if $C_f$ increases and", pub},
      {"M1-4", M::FeedbackFirst, Q::AStar, V::A1, P::Rounds, down, "should inspect fewer items", pub},
      {"M1-5", M::FeedbackFirst, Q::FStar, V::F1, P::CQuery, up, "provide more feedback", pub},
      {"M1-6", M::FeedbackFirst, Q::FStar, V::F1, P::CAssess, up, "if $C_q$ or $C_a$ increases", pub},
      {"M1-7", M::FeedbackFirst, Q::FStar, V::F1, P::CFeedback, down, "provide less feedback", pub},
      {"M1-8", M::FeedbackFirst, Q::FStar, V::F1, P::Gamma1, down, "fewer rounds of feedback are required", pub},
      {"M2-1", M::FeedbackAfter, Q::AStar, V::A2Partial, P::CFeedback, up, "examine more items per query", pub},
      {"M2-2", M::FeedbackAfter, Q::AStar, V::A2Partial, P::CAssess, down, "examine fewer items per query/feedback", pub},
      {"M2-3", M::FeedbackAfter, Q::AStar, V::A2Partial, P::Beta, up, "a user should examine more items", pub},
      {"M2-4", M::FeedbackAfter, Q::FStar, V::F2, P::CQuery, up, "motivates giving more feedback", pub},
      {"M2-5", M::FeedbackAfter, Q::FStar, V::F2, P::CFeedback, down, "warrants providing less feedback", pub},
      {"M2-6", M::FeedbackAfter, Q::FStar, V::F2, P::Gamma2, up, "users should give more feedback", pub},
      {"M2-7", M::FeedbackAfter, Q::FStar, V::F2, P::Alpha, down, "they should query more", pub},
      {"M2-8", M::FeedbackAfter, Q::AStar, V::A2Full, P::Gamma2, down, "should examine fewer items per query/feedback", draft, true},
      {"M2-9", M::FeedbackAfter, Q::FStar, V::F2Draft, P::Beta, down, "suggesting no feedback", draft},
      {"M1-9", M::FeedbackFirst, Q::FStar, V::F1, P::Beta, up, "the amount of feedback $F_1$", draft},
  };
  return registry;
}

const Claim& find_claim(std::string_view id) {
  for (const auto& c : claim_registry())
    if (c.id == id) return c;
  throw DomainError("unknown claim '" + std::string(id) + "'");
}

QuantityFn formula_quantity(FormulaVariant variant) {
  auto from = [](const ClampedValue& v) { return Evaluation{v.value, v.corner}; };
  switch (variant) {
    case FormulaVariant::A0:
      return [](const StaticsPoint& pt) {
        return Evaluation{a0_star(validate(pt.eff, pt.cost))};
      };
    case FormulaVariant::A1:
      return [](const StaticsPoint& pt) {
        return Evaluation{a1_star(pt.f, validate(pt.eff, pt.cost))};
      };
    case FormulaVariant::F1:
      return [from](const StaticsPoint& pt) {
        return from(f1_star(pt.a, validate(pt.eff, pt.cost)));
      };
    case FormulaVariant::A2Partial:
      return [](const StaticsPoint& pt) {
        return Evaluation{a2_star_partial(pt.f, validate(pt.eff, pt.cost))};
      };
    case FormulaVariant::A2Full:
      return [from](const StaticsPoint& pt) {
        return from(a2_star_full(pt.f, validate(pt.eff, pt.cost)));
      };
    case FormulaVariant::F2:
      return [from](const StaticsPoint& pt) {
        return from(f2_star(validate(pt.eff, pt.cost)));
      };
    case FormulaVariant::F2Draft:
      return [from](const StaticsPoint& pt) {
        return from(f2_star_draft(pt.a, validate(pt.eff, pt.cost)));
      };
  }
  throw DomainError("unknown formula variant");
}

namespace {

// How the oracle reads the quantity behind each formula variant.
struct OracleRead {
  ModelKind model;
  bool pin_f;
  bool pin_a;
  Quantity out;
};

OracleRead oracle_read(FormulaVariant v) {
  switch (v) {
    case FormulaVariant::A0:
      return {ModelKind::Baseline, false, false, Quantity::AStar};
    case FormulaVariant::A1:
      return {ModelKind::FeedbackFirst, true, false, Quantity::AStar};
    case FormulaVariant::F1:
      return {ModelKind::FeedbackFirst, false, true, Quantity::FStar};
    case FormulaVariant::A2Partial:
    case FormulaVariant::A2Full:
      return {ModelKind::FeedbackAfter, true, false, Quantity::AStar};
    case FormulaVariant::F2:
      return {ModelKind::FeedbackAfter, false, false, Quantity::FStar};
    case FormulaVariant::F2Draft:
      return {ModelKind::FeedbackAfter, false, true, Quantity::FStar};
  }
  throw DomainError("unknown formula variant");
}

Evaluation read_oracle(const OracleRead& r, const StaticsPoint& pt,
                       const GainTarget& g, const GridSpec& grid) {
  const ValidatedParams p = validate(pt.eff, pt.cost);
  Pin pin;
  if (r.pin_f) pin.f = pt.f;
  if (r.pin_a) pin.a = pt.a;
  const OptimalStrategy opt = minimize_cost_pinned(r.model, p, g, pin, grid);
  if (r.out == Quantity::AStar) return {opt.strategy.a, false};
  return {opt.strategy.f, opt.strategy.f == 0.0};
}

}  // namespace

QuantityFn oracle_quantity(FormulaVariant variant, const GainTarget& g,
                           const GridSpec& grid) {
  const OracleRead r = oracle_read(variant);
  return [r, g, grid](const StaticsPoint& pt) {
    return read_oracle(r, pt, g, grid);
  };
}

Range& range_of(Region& r, Parameter p) {
  switch (p) {
    case Parameter::Alpha: return r.alpha;
    case Parameter::Beta: return r.beta;
    case Parameter::Gamma1: return r.gamma1;
    case Parameter::Gamma2: return r.gamma2;
    case Parameter::CQuery: return r.c_query;
    case Parameter::CFeedback: return r.c_feedback;
    case Parameter::CAssess: return r.c_assess;
    case Parameter::Rounds: return r.f;
    case Parameter::Assessments: return r.a;
  }
  return r.alpha;
}

const Range& range_of(const Region& r, Parameter p) {
  return range_of(const_cast<Region&>(r), p);
}

void check_region(const Region& r, double h) {
  for (const auto& info : kParameters) {
    const Range& rg = range_of(r, info.p);
    if (!(rg.lo > 0.0) || !(rg.hi >= rg.lo) || !std::isfinite(rg.hi))
      throw DomainError("region range for " + std::string(info.name) +
                        " must satisfy 0 < lo <= hi");
  }
  // Every corner of the box, stretched by the finite-difference step, must
  // pass validation.
  StaticsPoint lo_pt, hi_pt;
  for (const auto& info : kParameters) {
    const Range& rg = range_of(r, info.p);
    lo_pt = with(lo_pt, info.p, rg.lo * (1.0 - h));
    hi_pt = with(hi_pt, info.p, rg.hi * (1.0 + h));
  }
  check_point(lo_pt);
  check_point(hi_pt);
}

StaticsPoint sample_point(const Region& r, std::uint64_t seed,
                          std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  std::mt19937_64 rng(seq);
  StaticsPoint pt;
  for (const auto& info : kParameters) {
    const Range& rg = range_of(r, info.p);
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    const double llo = std::log(rg.lo);
    const double lhi = std::log(rg.hi);
    pt = with(pt, info.p, std::exp(llo + u * (lhi - llo)));
  }
  return pt;
}

std::optional<double> SideTally::fraction() const {
  const int measured = holding + violating;
  if (measured == 0) return std::nullopt;
  return static_cast<double>(holding) / measured;
}

std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Agrees: return "AGREES";
    case Verdict::Disagrees: return "DISAGREES";
    case Verdict::NoData: return "NO_DATA";
  }
  return "NO_DATA";
}

namespace {

struct SideOutcome {
  bool skipped = false;
  Sign sign = Sign::Flat;
};

void tally(SideTally& t, const SideOutcome& o, Sign expected) {
  if (o.skipped) {
    ++t.skipped;
  } else if (o.sign == Sign::Flat) {
    ++t.flat;
  } else if (o.sign == expected) {
    ++t.holding;
  } else {
    ++t.violating;
  }
}

// Memoises oracle reads within one sample: several claims perturb the same
// parameter of the same conditional problem.
class OracleMemo {
 public:
  OracleMemo(const GainTarget& g, const GridSpec& grid) : g_(g), grid_(grid) {}

  QuantityFn quantity(FormulaVariant v) {
    const OracleRead r = oracle_read(v);
    return [this, r](const StaticsPoint& pt) {
      const Key key{static_cast<int>(r.model), r.pin_f, r.pin_a,
                    static_cast<int>(r.out), pt.eff.alpha, pt.eff.beta,
                    pt.eff.gamma1, pt.eff.gamma2, pt.cost.c_query,
                    pt.cost.c_feedback, pt.cost.c_assess,
                    r.pin_f ? pt.f : 0.0, r.pin_a ? pt.a : 0.0};
      auto it = cache_.find(key);
      if (it == cache_.end()) {
        Entry e;
        try {
          e.value = read_oracle(r, pt, g_, grid_);
        } catch (const Error&) {
          e.failed = true;
        }
        it = cache_.emplace(key, e).first;
      }
      if (it->second.failed) throw Unbounded("oracle failed at this point");
      return it->second.value;
    };
  }

 private:
  using Key = std::tuple<int, bool, bool, int, double, double, double, double,
                         double, double, double, double, double>;
  struct Entry {
    Evaluation value;
    bool failed = false;
  };
  GainTarget g_;
  GridSpec grid_;
  std::map<Key, Entry> cache_;
};

SideOutcome measure(const QuantityFn& fn, Parameter p, const StaticsPoint& pt,
                    double h) {
  try {
    return {false, finite_diff_sign(fn, p, pt, h).sign};
  } catch (const Error&) {
    return {true, Sign::Flat};
  }
}

}  // namespace

ClaimAuditReport audit_claims(const Region& region, const AuditOptions& opt) {
  return audit_claims(region, opt, claim_registry());
}

ClaimAuditReport audit_claims(const Region& region, const AuditOptions& opt,
                              const std::vector<Claim>& claims) {
  if (opt.samples < 1) throw DomainError("samples must be >= 1");
  check_region(region, opt.h);
  check_grid(opt.grid);
  const GainTarget g(opt.gain);

  ClaimAuditReport report;
  report.region = region;
  report.options = opt;
  for (const Claim& c : claims) {
    ClaimResult r;
    r.claim = c;
    r.samples = opt.samples;
    report.claims.push_back(std::move(r));
  }

  std::vector<QuantityFn> formulas;
  for (const Claim& c : claims) formulas.push_back(formula_quantity(c.formula));

  // Samples are independent; aggregation below is a plain count so the
  // result does not depend on evaluation order.
  for (int s = 0; s < opt.samples; ++s) {
    const StaticsPoint pt = sample_point(region, opt.seed, s);
    OracleMemo memo(g, opt.grid);
    for (std::size_t i = 0; i < claims.size(); ++i) {
      const Claim& c = claims[i];
      ClaimResult& r = report.claims[i];
      const SideOutcome fo = measure(formulas[i], c.parameter, pt, opt.h);
      const SideOutcome oo =
          measure(memo.quantity(c.formula), c.parameter, pt, opt.h);
      tally(r.formula, fo, c.expected);
      tally(r.oracle, oo, c.expected);
      const bool f_valid = !fo.skipped && fo.sign != Sign::Flat;
      const bool o_valid = !oo.skipped && oo.sign != Sign::Flat;
      if (f_valid && o_valid) {
        ++r.compared;
        if (fo.sign == oo.sign) ++r.agreeing;
      }
      const bool violates = (f_valid && fo.sign != c.expected) ||
                            (o_valid && oo.sign != c.expected);
      if (violates && r.counterexamples.size() < 5)
        r.counterexamples.push_back(
            {static_cast<std::uint64_t>(s), pt, fo.sign, oo.sign});
    }
  }

  for (ClaimResult& r : report.claims) {
    if (r.compared == 0)
      r.verdict = Verdict::NoData;
    else
      r.verdict = r.agreeing == r.compared ? Verdict::Agrees : Verdict::Disagrees;
  }
  return report;
}

SweepTable sweep(ModelKind model, const ValidatedParams& p, Parameter vary,
                 double lo, double hi, int steps, const GainTarget& g,
                 const std::set<Quantity>& targets, const GridSpec& grid) {
  if (!(lo < hi)) throw DomainError("sweep needs lo < hi");
  if (steps < 2) throw DomainError("sweep needs steps >= 2");
  if (vary == Parameter::Rounds || vary == Parameter::Assessments)
    throw DomainError("sweep varies model parameters only");
  check_grid(grid);

  const bool want_a = targets.count(Quantity::AStar) > 0;
  const bool want_f = targets.count(Quantity::FStar) > 0;

  SweepTable t;
  t.parameter = std::string(parameter_name(vary));
  t.columns.push_back(t.parameter);
  switch (model) {
    case ModelKind::Baseline:
      if (want_a) t.columns.push_back("a0_star");
      break;
    case ModelKind::FeedbackFirst:
      if (want_a) t.columns.push_back("a1_star");
      if (want_f) t.columns.push_back("f1_star");
      break;
    case ModelKind::FeedbackAfter:
      if (want_a) {
        t.columns.push_back("a2_star_full");
        t.columns.push_back("a2_star_partial");
      }
      if (want_f) {
        t.columns.push_back("f2_star");
        t.columns.push_back("f2_star_draft");
      }
      break;
  }
  for (const char* c : {"oracle_f", "oracle_a", "oracle_q", "total_cost",
                        "achieved_gain"})
    t.columns.emplace_back(c);

  StaticsPoint base{p.eff(), p.cost(), 0.0, 1.0};
  for (int i = 0; i < steps; ++i) {
    const double x = i + 1 == steps ? hi : lo + (hi - lo) * i / (steps - 1);
    const StaticsPoint pt = with(base, vary, x);
    const ValidatedParams vp = validate(pt.eff, pt.cost);

    std::vector<std::optional<double>> row{x};
    try {
      switch (model) {
        case ModelKind::Baseline:
          if (want_a) row.push_back(a0_star(vp));
          break;
        case ModelKind::FeedbackFirst: {
          std::optional<ClosedFormSolution> s;
          try {
            s = model1_solve(vp, g);
          } catch (const Diverged&) {
          }
          if (want_a) row.push_back(s ? std::optional(s->a_star) : std::nullopt);
          if (want_f) row.push_back(s ? std::optional(s->f_star) : std::nullopt);
          break;
        }
        case ModelKind::FeedbackAfter: {
          const double f = f2_star(vp).value;
          if (want_a) {
            row.push_back(a2_star_full(f, vp).value);
            row.push_back(a2_star_partial(f, vp));
          }
          if (want_f) {
            row.push_back(f);
            std::optional<double> draft;
            try {
              draft = model2_draft_solve(vp, g).f_star;
            } catch (const Diverged&) {
            }
            row.push_back(draft);
          }
          break;
        }
      }
    } catch (const NoInteriorOptimum& e) {
      throw DomainError(t.parameter + "=" + std::to_string(x) + ": " + e.what());
    }

    try {
      const OptimalStrategy o = minimize_cost(model, vp, g, grid);
      row.insert(row.end(), {o.strategy.f, o.strategy.a, o.strategy.q,
                             o.total_cost, o.achieved_gain});
    } catch (const Unbounded&) {
      row.insert(row.end(), 5, std::nullopt);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace convecon
