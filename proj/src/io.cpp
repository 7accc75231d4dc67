#include "convecon/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace convecon::io {

namespace {

double number(const json& j, const std::string& key) {
  if (!j.contains(key)) throw DomainError("missing field '" + key + "'");
  const json& v = j.at(key);
  if (!v.is_number()) throw DomainError("field '" + key + "' must be a number");
  return v.get<double>();
}

void reject_unknown(const json& j, std::initializer_list<std::string_view> known,
                    const char* what) {
  if (!j.is_object()) throw DomainError(std::string(what) + " must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw DomainError(std::string("unknown field '") + key + "' in " + what);
  }
}

json optional_number(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

json point_to_json(const StaticsPoint& pt) {
  json j;
  j["alpha"] = pt.eff.alpha;
  j["beta"] = pt.eff.beta;
  j["gamma1"] = pt.eff.gamma1;
  j["gamma2"] = pt.eff.gamma2;
  j["c_query"] = pt.cost.c_query;
  j["c_feedback"] = pt.cost.c_feedback;
  j["c_assess"] = pt.cost.c_assess;
  j["f"] = pt.f;
  j["a"] = pt.a;
  return j;
}

json tally_to_json(const SideTally& t) {
  return {{"fraction", optional_number(t.fraction())},
          {"holding", t.holding},
          {"violating", t.violating},
          {"flat", t.flat},
          {"skipped", t.skipped}};
}

constexpr std::array<Parameter, 9> kRegionParams = {
    Parameter::Alpha,  Parameter::Beta,      Parameter::Gamma1,
    Parameter::Gamma2, Parameter::CQuery,    Parameter::CFeedback,
    Parameter::CAssess, Parameter::Rounds,   Parameter::Assessments};

}  // namespace

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

ValidatedParams params_from_json(const json& j) {
  reject_unknown(j,
                 {"alpha", "beta", "gamma1", "gamma2", "c_query", "c_feedback",
                  "c_assess"},
                 "parameter file");
  EfficiencyParams eff{number(j, "alpha"), number(j, "beta"),
                       number(j, "gamma1"), number(j, "gamma2")};
  CostParams cost{number(j, "c_query"), number(j, "c_feedback"),
                  number(j, "c_assess")};
  return validate(eff, cost);
}

json params_to_json(const ValidatedParams& p) {
  return {{"alpha", p.eff().alpha},         {"beta", p.eff().beta},
          {"gamma1", p.eff().gamma1},       {"gamma2", p.eff().gamma2},
          {"c_query", p.cost().c_query},    {"c_feedback", p.cost().c_feedback},
          {"c_assess", p.cost().c_assess}};
}

GridSpec grid_from_json(const json& j, const GridSpec& base) {
  reject_unknown(j, {"min", "max", "points", "refinements"}, "grid");
  GridSpec g = base;
  if (j.contains("min")) g.min = number(j, "min");
  if (j.contains("max")) g.max = number(j, "max");
  auto integer = [&](const char* key) {
    const json& v = j.at(key);
    if (!v.is_number_integer())
      throw DomainError(std::string("grid field '") + key + "' must be an integer");
    return v.get<int>();
  };
  if (j.contains("points")) g.points = integer("points");
  if (j.contains("refinements")) g.refinements = integer("refinements");
  check_grid(g);
  return g;
}

json grid_to_json(const GridSpec& g) {
  return {{"min", g.min},
          {"max", g.max},
          {"points", g.points},
          {"refinements", g.refinements}};
}

Region region_from_json(const json& j) {
  if (!j.is_object()) throw DomainError("region must be a JSON object");
  Region r;
  for (const auto& [key, value] : j.items()) {
    const Parameter p = parse_parameter(key);
    if (!value.is_array() || value.size() != 2 || !value[0].is_number() ||
        !value[1].is_number())
      throw DomainError("region field '" + key + "' must be [lo, hi]");
    range_of(r, p) = Range{value[0].get<double>(), value[1].get<double>()};
  }
  return r;
}

json region_to_json(const Region& r) {
  json j = json::object();
  for (Parameter p : kRegionParams) {
    const Range& rg = range_of(r, p);
    j[std::string(parameter_name(p))] = {rg.lo, rg.hi};
  }
  return j;
}

json to_json(const Strategy& s) {
  return {{"model", model_tag(s.model)}, {"q", s.q}, {"f", s.f}, {"a", s.a}};
}

json to_json(const KktReport& k) {
  return {{"lambda", k.lambda},
          {"residual_q", k.residual_q},
          {"residual_f", k.residual_f},
          {"residual_a", k.residual_a},
          {"residual_max", k.residual_max},
          {"constraint_gap", k.constraint_gap}};
}

json to_json(const ClosedFormSolution& s) {
  json j = {{"source", source_name(s.source)},
            {"a_star", s.a_star},
            {"f_star", s.f_star},
            {"q_star", s.q_star},
            {"corner", s.corner}};
  if (s.raw_a) j["raw_a"] = *s.raw_a;
  if (s.raw_f) j["raw_f"] = *s.raw_f;
  if (s.source == SolutionSource::Model1Coupled ||
      s.source == SolutionSource::Model2DraftCoupled)
    j["iterations"] = s.iterations;
  return j;
}

json to_json(const OptimalStrategy& s) {
  json j = {{"strategy", to_json(s.strategy)},
            {"achieved_gain", s.achieved_gain},
            {"total_cost", s.total_cost},
            {"kkt", to_json(s.kkt)},
            {"grid", grid_to_json(s.grid_meta.spec)},
            {"rounds", s.grid_meta.rounds},
            {"evaluations", s.grid_meta.evaluations}};
  if (s.integer_neighbor) j["integer_neighbor"] = to_json(*s.integer_neighbor);
  return j;
}

json to_json(const ClaimAuditReport& r) {
  json claims = json::array();
  for (const ClaimResult& c : r.claims) {
    json ce = json::array();
    for (const Counterexample& x : c.counterexamples)
      ce.push_back({{"sample", x.sample},
                    {"point", point_to_json(x.point)},
                    {"formula_sign", std::string(1, sign_char(x.formula))},
                    {"oracle_sign", std::string(1, sign_char(x.oracle))}});
    claims.push_back(
        {{"id", c.claim.id},
         {"model", model_tag(c.claim.model)},
         {"quantity", quantity_name(c.claim.quantity)},
         {"formula_variant", formula_name(c.claim.formula)},
         {"parameter", parameter_name(c.claim.parameter)},
         {"expected", std::string(1, sign_char(c.claim.expected))},
         {"quote", c.claim.quote},
         {"provenance", provenance_name(c.claim.provenance)},
         {"unconfirmed", c.claim.unconfirmed},
         {"informational", c.claim.provenance == Provenance::Draft},
         {"samples", c.samples},
         {"fraction_holding_formula", optional_number(c.formula.fraction())},
         {"fraction_holding_oracle", optional_number(c.oracle.fraction())},
         {"formula", tally_to_json(c.formula)},
         {"oracle", tally_to_json(c.oracle)},
         {"compared", c.compared},
         {"agreeing", c.agreeing},
         {"verdict", verdict_name(c.verdict)},
         {"no_data", !c.formula.fraction().has_value()},
         {"counterexamples", ce}});
  }
  return {{"region", region_to_json(r.region)},
          {"options",
           {{"samples", r.options.samples},
            {"seed", r.options.seed},
            {"gain", r.options.gain},
            {"h", r.options.h},
            {"grid", grid_to_json(r.options.grid)}}},
          {"claims", claims}};
}

json to_json(const EstimationResult& r) {
  return {{"model", model_tag(r.model)},
          {"alpha_hat", optional_number(r.alpha_hat)},
          {"beta_hat", optional_number(r.beta_hat)},
          {"gamma_hat", optional_number(r.gamma_hat)},
          {"cq_hat", optional_number(r.cq_hat)},
          {"cf_hat", optional_number(r.cf_hat)},
          {"ca_hat", optional_number(r.ca_hat)},
          {"residual_rms", r.residual_rms},
          {"cost_residual_rms", r.cost_residual_rms},
          {"n_sessions", r.n_sessions},
          {"condition_warning", r.condition_warning},
          {"unidentified", r.unidentified}};
}

json to_json(const Recommendation& r) {
  json models = json::array();
  for (const ModelOutcome& o : r.outcomes) {
    json m = {{"model", model_tag(o.model)}, {"comparable", o.comparable}};
    if (o.optimum) {
      m["total_cost"] = o.optimum->total_cost;
      m["f"] = o.optimum->strategy.f;
      m["a"] = o.optimum->strategy.a;
      m["q"] = o.optimum->strategy.q;
    }
    if (!o.note.empty()) m["note"] = o.note;
    models.push_back(std::move(m));
  }
  return {{"cheapest", r.cheapest ? json(model_tag(*r.cheapest)) : json(nullptr)},
          {"feedback_first_worthwhile", r.feedback_first_worthwhile},
          {"feedback_after_worthwhile", r.feedback_after_worthwhile},
          {"models", models}};
}

json to_json(const SessionLog& log) {
  json actions = json::array();
  for (const SessionAction& a : log.actions)
    actions.push_back({{"step", a.step},
                       {"kind", action_name(a.kind)},
                       {"unit_cost", a.unit_cost}});
  return {{"session_id", log.session_id},
          {"model", model_tag(log.model)},
          {"q", log.strategy.q},
          {"f", log.strategy.f},
          {"a", log.strategy.a},
          {"realized_gain", log.realized_gain},
          {"realized_cost", log.realized_cost},
          {"stream_id", log.stream_id},
          {"actions", actions}};
}

SessionLog session_from_json(const json& j) {
  reject_unknown(j,
                 {"session_id", "model", "q", "f", "a", "realized_gain",
                  "realized_cost", "stream_id", "actions"},
                 "session");
  SessionLog log;
  if (!j.contains("session_id") || !j.at("session_id").is_string())
    throw DomainError("session_id must be a string");
  log.session_id = j.at("session_id").get<std::string>();
  if (!j.contains("model") || !j.at("model").is_string())
    throw DomainError("model must be a string");
  log.model = parse_model_tag(j.at("model").get<std::string>());
  log.strategy = Strategy{log.model, number(j, "q"), number(j, "f"), number(j, "a")};
  check_strategy(log.strategy);
  log.realized_gain = number(j, "realized_gain");
  log.realized_cost = number(j, "realized_cost");
  if (j.contains("stream_id")) log.stream_id = j.at("stream_id").get<std::uint64_t>();
  if (j.contains("actions")) {
    const json& acts = j.at("actions");
    if (!acts.is_array()) throw DomainError("actions must be an array");
    for (std::size_t i = 0; i < acts.size(); ++i) {
      const json& a = acts[i];
      SessionAction act;
      act.step = a.at("step").get<std::size_t>();
      if (act.step != i) throw DomainError("action steps must be contiguous from 0");
      act.kind = parse_action(a.at("kind").get<std::string>());
      act.unit_cost = number(a, "unit_cost");
      log.actions.push_back(act);
    }
  }
  return log;
}

void write_jsonl(std::ostream& os, const std::vector<SessionLog>& logs) {
  for (const SessionLog& log : logs) os << to_json(log).dump() << '\n';
}

std::vector<SessionLog> read_jsonl(std::istream& is) {
  std::vector<SessionLog> logs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      logs.push_back(session_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw DomainError("line " + std::to_string(lineno) + ": " + e.what());
    } catch (const DomainError& e) {
      throw DomainError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return logs;
}

void write_csv(std::ostream& os, const SweepTable& t) {
  for (std::size_t i = 0; i < t.columns.size(); ++i)
    os << (i ? "," : "") << t.columns[i];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) os << ',';
      if (row[i]) os << format_double(*row[i]);
    }
    os << '\n';
  }
}

void write_audit_table(std::ostream& os, const ClaimAuditReport& r) {
  auto frac = [](const std::optional<double>& v) {
    if (!v) return std::string("no data");
    std::ostringstream s;
    s.imbue(std::locale::classic());
    s << std::fixed << std::setprecision(4) << *v;
    return s.str();
  };
  os << std::left << std::setw(6) << "id" << "  " << std::setw(4) << "exp"
     << "  " << std::setw(9) << "formula" << "  " << std::setw(9) << "oracle"
     << "  " << std::setw(10) << "verdict" << "  " << std::setw(10) << "source"
     << "  quote\n";
  for (const ClaimResult& c : r.claims) {
    os << std::left << std::setw(6) << c.claim.id << "  " << std::setw(4)
       << sign_char(c.claim.expected) << "  " << std::setw(9)
       << frac(c.formula.fraction()) << "  " << std::setw(9)
       << frac(c.oracle.fraction()) << "  " << std::setw(10)
       << verdict_name(c.verdict) << "  " << std::setw(10)
       << provenance_name(c.claim.provenance) << "  \"" << c.claim.quote
       << "\"\n";
  }
}

namespace {

void flatten(std::ostream& os, const json& j, const std::string& path) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items())
      flatten(os, v, path.empty() ? k : path + "." + k);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i)
      flatten(os, j[i], path + "[" + std::to_string(i) + "]");
  } else {
    os << path << ": " << (j.is_string() ? j.get<std::string>() : j.dump())
       << '\n';
  }
}

}  // namespace

void write_text(std::ostream& os, const json& j) { flatten(os, j, ""); }

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw DomainError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

}  // namespace convecon::io
