#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "convecon/model.hpp"
#include "convecon/oracle.hpp"

// Comparative statics: signs of optimal quantities under a change of one
// parameter, measured on the printed formulas and on the oracle.

namespace convecon {

enum class Parameter {
  Alpha,
  Beta,
  Gamma1,
  Gamma2,
  CQuery,
  CFeedback,
  CAssess,
  Rounds,       // f, the feedback level a formula is evaluated at
  Assessments,  // a, the assessment level a formula is evaluated at
};

std::string_view parameter_name(Parameter p);
Parameter parse_parameter(std::string_view name);

/// Parameters plus the (f, a) levels at which coupled formulas are read.
struct StaticsPoint {
  EfficiencyParams eff;
  CostParams cost;
  double f = 1.0;
  double a = 1.0;
};

double get(const StaticsPoint& pt, Parameter p);
StaticsPoint with(StaticsPoint pt, Parameter p, double value);

enum class Sign { Negative = -1, Flat = 0, Positive = 1 };

char sign_char(Sign s);

/// A quantity value; `corner` marks a value that sits on a clamp.
struct Evaluation {
  double value = 0.0;
  bool corner = false;
};

using QuantityFn = std::function<Evaluation(const StaticsPoint&)>;

struct SignResult {
  Sign sign = Sign::Flat;
  double derivative = 0.0;
  bool censored = false;  // a corner on either side of the perturbation
};

/// Central difference with relative step h. |derivative| below `flat` (and
/// corner-censored samples) report Sign::Flat. Throws DomainError when a
/// perturbed point leaves the parameter domain.
SignResult finite_diff_sign(const QuantityFn& quantity, Parameter parameter,
                            const StaticsPoint& at, double h = 1e-4,
                            double flat = 1e-9);

enum class Quantity { AStar, FStar };

/// The printed formula a claim is measured on.
enum class FormulaVariant { A0, A1, F1, A2Partial, A2Full, F2, F2Draft };

enum class Provenance { Published, Draft };

std::string_view quantity_name(Quantity q);
std::string_view formula_name(FormulaVariant v);
std::string_view provenance_name(Provenance p);

struct Claim {
  std::string id;
  ModelKind model;
  Quantity quantity;
  FormulaVariant formula;
  Parameter parameter;
  Sign expected;
  std::string quote;
  Provenance provenance;
  bool unconfirmed = false;  // carried an open authoring note
};

/// The fixed registry of behavioural claims, in stable order.
const std::vector<Claim>& claim_registry();
const Claim& find_claim(std::string_view id);

/// The printed formula behind `variant`, read at the point's (f, a).
QuantityFn formula_quantity(FormulaVariant variant);

/// The oracle counterpart of `variant`: the formula's (f, a) inputs are held
/// fixed and the remaining coordinates minimised.
QuantityFn oracle_quantity(FormulaVariant variant, const GainTarget& g,
                           const GridSpec& grid);

struct Range {
  double lo;
  double hi;
};

/// Box sampled log-uniformly by the auditor.
struct Region {
  Range alpha{0.5, 0.95};
  Range beta{0.1, 0.45};
  Range gamma1{0.01, 0.3};
  Range gamma2{0.05, 0.45};
  Range c_query{2.0, 50.0};
  Range c_feedback{0.5, 10.0};
  Range c_assess{0.5, 5.0};
  Range f{0.5, 8.0};
  Range a{1.0, 30.0};
};

Range& range_of(Region& r, Parameter p);
const Range& range_of(const Region& r, Parameter p);

/// Throws DomainError when a corner of the box (stretched by h) leaves the
/// parameter domain.
void check_region(const Region& r, double h);

/// Deterministic log-uniform draw number `index` from the box.
StaticsPoint sample_point(const Region& r, std::uint64_t seed,
                          std::uint64_t index);

inline GridSpec default_audit_grid() { return GridSpec{1e-3, 1e4, 60, 8}; }

struct AuditOptions {
  int samples = 1000;
  std::uint64_t seed = 42;
  double gain = 100.0;
  double h = 1e-4;
  GridSpec grid = default_audit_grid();
};

struct Counterexample {
  std::uint64_t sample = 0;
  StaticsPoint point;
  Sign formula = Sign::Flat;
  Sign oracle = Sign::Flat;
};

struct SideTally {
  int holding = 0;
  int violating = 0;
  int flat = 0;
  int skipped = 0;
  /// holding / (samples - flat - skipped); empty when nothing was measured.
  std::optional<double> fraction() const;
};

enum class Verdict { Agrees, Disagrees, NoData };
std::string_view verdict_name(Verdict v);

struct ClaimResult {
  Claim claim;
  int samples = 0;
  SideTally formula;
  SideTally oracle;
  int compared = 0;  // samples where both sides have a non-flat sign
  int agreeing = 0;
  Verdict verdict = Verdict::NoData;
  std::vector<Counterexample> counterexamples;  // at most 5
};

struct ClaimAuditReport {
  Region region;
  AuditOptions options;
  std::vector<ClaimResult> claims;
};

/// Samples the region and scores every registry claim on the printed
/// formula and on the oracle. Deterministic for fixed (region, options).
ClaimAuditReport audit_claims(const Region& region, const AuditOptions& opt);

/// Audits a subset of the registry.
ClaimAuditReport audit_claims(const Region& region, const AuditOptions& opt,
                              const std::vector<Claim>& claims);

struct SweepTable {
  std::string parameter;
  std::vector<std::string> columns;
  std::vector<std::vector<std::optional<double>>> rows;
};

/// One row per linearly spaced value of `vary` in [lo, hi]: the closed-form
/// quantities for `model`, then the oracle (f, a, q), total cost and gain.
/// Throws DomainError when a grid value leaves the parameter domain or the
/// model's closed form has no interior optimum there.
SweepTable sweep(ModelKind model, const ValidatedParams& p, Parameter vary,
                 double lo, double hi, int steps, const GainTarget& g,
                 const std::set<Quantity>& targets, const GridSpec& grid = {});

}  // namespace convecon
