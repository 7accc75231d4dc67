#include "convecon/cli.hpp"

#include <algorithm>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "convecon/io.hpp"

namespace convecon::cli {

namespace {

using io::json;

constexpr const char* kExitCodes =
    "Exit codes: 0 success, 2 input or validation error, 3 no interior or "
    "bounded optimum, 4 insufficient design for estimation.";

struct RunConfig {
  std::string params_path;
  std::string model = "m0";
  double gain = 100.0;
  std::string grid;  // file path or inline JSON object
  std::string out_path;
  std::uint64_t seed = 42;
  std::string format = "json";

  bool integer = false;

  std::string region_path;
  int samples = 1000;

  std::string vary;
  double lo = 0.0;
  double hi = 0.0;
  int steps = 0;
  std::string targets = "a,f";

  int n = 100;
  double sigma = 0.0;
  std::optional<double> q, f, a;

  std::string logs_path;
};

ValidatedParams load_params(const RunConfig& c) {
  if (c.params_path.empty()) throw DomainError("--params is required");
  return io::params_from_json(io::read_json_file(c.params_path));
}

GridSpec load_grid(const RunConfig& c, const GridSpec& base = {}) {
  if (c.grid.empty()) return base;
  const auto first = c.grid.find_first_not_of(" \t");
  if (first != std::string::npos && c.grid[first] == '{') {
    try {
      return io::grid_from_json(json::parse(c.grid), base);
    } catch (const json::exception& e) {
      throw DomainError(std::string("--grid is not valid JSON: ") + e.what());
    }
  }
  return io::grid_from_json(io::read_json_file(c.grid), base);
}

void emit(const RunConfig& c, const std::string& body, std::ostream& out) {
  if (c.out_path.empty()) {
    out << body;
    return;
  }
  std::ofstream f(c.out_path, std::ios::binary | std::ios::trunc);
  if (!f) throw DomainError("cannot write '" + c.out_path + "'");
  f << body;
  if (!f) throw DomainError("failed writing '" + c.out_path + "'");
}

std::string render(const RunConfig& c, const json& doc) {
  std::ostringstream s;
  if (c.format == "text")
    io::write_text(s, doc);
  else
    s << doc.dump(2) << '\n';
  return s.str();
}

json error_entry(SolutionSource src, const Error& e, const char* kind) {
  return {{"source", source_name(src)}, {"error", e.what()}, {"kind", kind}};
}

int cmd_optimize(const RunConfig& c, std::ostream& out) {
  const ValidatedParams p = load_params(c);
  const ModelKind model = parse_model_tag(c.model);
  const GainTarget g(c.gain);

  json variants = json::array();
  int solved = 0;
  auto attempt = [&](SolutionSource src, auto&& solve) {
    try {
      variants.push_back(io::to_json(solve()));
      ++solved;
    } catch (const NoInteriorOptimum& e) {
      variants.push_back(error_entry(src, e, "NoInteriorOptimum"));
    } catch (const Diverged& e) {
      variants.push_back(error_entry(src, e, "Diverged"));
    } catch (const DomainError& e) {
      variants.push_back(error_entry(src, e, "DomainError"));
    }
  };
  switch (model) {
    case ModelKind::Baseline:
      attempt(SolutionSource::Model0, [&] { return model0_solve(p, g); });
      break;
    case ModelKind::FeedbackFirst:
      attempt(SolutionSource::Model1Coupled, [&] { return model1_solve(p, g); });
      break;
    case ModelKind::FeedbackAfter:
      attempt(SolutionSource::Model2Full, [&] { return model2_full_solve(p, g); });
      attempt(SolutionSource::Model2Partial,
              [&] { return model2_partial_solve(p, g); });
      attempt(SolutionSource::Model2DraftCoupled,
              [&] { return model2_draft_solve(p, g); });
      break;
  }

  json doc = {{"model", model_tag(model)},
              {"gain", c.gain},
              {"params", io::params_to_json(p)},
              {"variants", variants}};
  if (c.integer) {
    try {
      OptimalStrategy opt = minimize_cost(model, p, g, load_grid(c));
      const Strategy s = integer_solution(opt, model, p, g);
      doc["integer"] = {{"strategy", io::to_json(s)},
                        {"cost", cost(s, p)},
                        {"gain", gain(s, p)},
                        {"continuous", io::to_json(opt.strategy)}};
    } catch (const Unbounded& e) {
      doc["integer"] = {{"error", e.what()}, {"kind", "Unbounded"}};
    } catch (const Infeasible& e) {
      doc["integer"] = {{"error", e.what()}, {"kind", "Infeasible"}};
    }
  }
  emit(c, render(c, doc), out);
  return solved > 0 ? kOk : kNoOptimum;
}

int cmd_oracle(const RunConfig& c, std::ostream& out) {
  const ValidatedParams p = load_params(c);
  const ModelKind model = parse_model_tag(c.model);
  const GainTarget g(c.gain);
  OptimalStrategy opt = minimize_cost(model, p, g, load_grid(c));
  if (c.integer) opt.integer_neighbor = integer_solution(opt, model, p, g);
  json doc = io::to_json(opt);
  doc["model"] = model_tag(model);
  doc["gain"] = c.gain;
  emit(c, render(c, doc), out);
  return kOk;
}

int cmd_audit(const RunConfig& c, std::ostream& out) {
  Region region;
  GridSpec grid = default_audit_grid();
  if (!c.region_path.empty()) {
    json j = io::read_json_file(c.region_path);
    if (!j.is_object()) throw DomainError("region file must be a JSON object");
    if (j.contains("grid")) {
      grid = io::grid_from_json(j.at("grid"), grid);
      j.erase("grid");
    }
    region = io::region_from_json(j);
  }
  AuditOptions opt;
  opt.samples = c.samples;
  opt.seed = c.seed;
  opt.gain = c.gain;
  opt.grid = load_grid(c, grid);
  const ClaimAuditReport report = audit_claims(region, opt);

  std::ostringstream table;
  io::write_audit_table(table, report);
  if (!c.out_path.empty()) {
    emit(c, io::to_json(report).dump(2) + "\n", out);
    out << table.str();
  } else if (c.format == "text") {
    out << table.str();
  } else {
    out << io::to_json(report).dump(2) << '\n';
  }
  return kOk;
}

std::set<Quantity> parse_targets(const std::string& spec) {
  std::set<Quantity> t;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "a" || item == "AStar")
      t.insert(Quantity::AStar);
    else if (item == "f" || item == "FStar")
      t.insert(Quantity::FStar);
    else
      throw DomainError("unknown sweep target '" + item + "'");
  }
  return t;
}

int cmd_sweep(const RunConfig& c, std::ostream& out) {
  const ValidatedParams p = load_params(c);
  const ModelKind model = parse_model_tag(c.model);
  const SweepTable t = sweep(model, p, parse_parameter(c.vary), c.lo, c.hi,
                             c.steps, GainTarget(c.gain), parse_targets(c.targets),
                             load_grid(c));
  std::ostringstream s;
  io::write_csv(s, t);
  emit(c, s.str(), out);
  return kOk;
}

int cmd_simulate(const RunConfig& c, std::ostream& out) {
  const ValidatedParams p = load_params(c);
  const ModelKind model = parse_model_tag(c.model);
  std::vector<SessionLog> logs;
  if (c.q || c.a) {
    if (!c.q || !c.a) throw DomainError("--q and --a must be given together");
    const Strategy s{model, *c.q, c.f.value_or(0.0), *c.a};
    logs = simulate(model, s, p, c.sigma, c.seed, c.n);
  } else {
    logs = simulate_design(model, random_design(model, c.n, c.seed), p, c.sigma,
                           c.seed);
  }
  std::ostringstream s;
  io::write_jsonl(s, logs);
  emit(c, s.str(), out);
  return kOk;
}

int cmd_fit(const RunConfig& c, std::ostream& out) {
  if (c.logs_path.empty()) throw DomainError("--logs is required");
  std::ifstream in(c.logs_path);
  if (!in) throw DomainError("cannot open '" + c.logs_path + "'");
  const std::vector<SessionLog> logs = io::read_jsonl(in);
  emit(c, render(c, io::to_json(fit_params(logs))), out);
  return kOk;
}

int cmd_viability(const RunConfig& c, std::ostream& out) {
  const ValidatedParams p = load_params(c);
  const Recommendation r = viability(p, GainTarget(c.gain), load_grid(c));
  json doc = io::to_json(r);
  doc["gain"] = c.gain;
  emit(c, render(c, doc), out);
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Economic models of conversational search", "convecon"};
  app.footer(kExitCodes);
  app.require_subcommand(1);
  RunConfig c;

  auto add_params = [&](CLI::App* s) {
    s->add_option("--params", c.params_path, "Parameter JSON file")->required();
  };
  auto add_model = [&](CLI::App* s) {
    s->add_option("--model", c.model, "Model: m0, m1 or m2")
        ->check(CLI::IsMember({"m0", "m1", "m2"}));
  };
  auto add_gain = [&](CLI::App* s) {
    s->add_option("--gain", c.gain, "Gain target G")->capture_default_str();
  };
  auto add_grid = [&](CLI::App* s) {
    s->add_option("--grid", c.grid, "Grid JSON file or inline JSON object");
  };
  auto add_out = [&](CLI::App* s) {
    s->add_option("--out", c.out_path, "Output path (default: standard output)");
  };
  auto add_format = [&](CLI::App* s, std::vector<std::string> allowed) {
    s->add_option("--format", c.format, "Output format")
        ->check(CLI::IsMember(std::move(allowed)))
        ->capture_default_str();
  };

  auto* optimize = app.add_subcommand("optimize", "Closed-form optimal strategies");
  add_params(optimize);
  add_model(optimize);
  add_gain(optimize);
  add_grid(optimize);
  add_out(optimize);
  add_format(optimize, {"json", "text"});
  optimize->add_flag("--integer", c.integer, "Add the integer-refined oracle optimum");

  auto* oracle = app.add_subcommand("oracle", "Grid-search constrained optimum");
  add_params(oracle);
  add_model(oracle);
  add_gain(oracle);
  add_grid(oracle);
  add_out(oracle);
  add_format(oracle, {"json", "text"});
  oracle->add_flag("--integer", c.integer, "Add the integer neighbour");

  auto* audit = app.add_subcommand("audit", "Audit comparative-statics claims");
  audit->add_option("--region", c.region_path, "Region JSON file");
  audit->add_option("--samples", c.samples, "Sampled parameter points")
      ->capture_default_str();
  audit->add_option("--seed", c.seed, "Sampling seed")->capture_default_str();
  add_gain(audit);
  add_grid(audit);
  add_out(audit);
  add_format(audit, {"json", "text"});

  auto* sweep_cmd = app.add_subcommand("sweep", "Parameter sweep to CSV");
  add_params(sweep_cmd);
  add_model(sweep_cmd);
  add_gain(sweep_cmd);
  add_grid(sweep_cmd);
  add_out(sweep_cmd);
  add_format(sweep_cmd, {"csv"});
  sweep_cmd->add_option("--vary", c.vary, "Parameter to vary")->required();
  sweep_cmd->add_option("--lo", c.lo, "Lowest value")->required();
  sweep_cmd->add_option("--hi", c.hi, "Highest value")->required();
  sweep_cmd->add_option("--steps", c.steps, "Number of grid values")->required();
  sweep_cmd->add_option("--targets", c.targets, "Quantities: a, f or a,f")
      ->capture_default_str();

  auto* simulate_cmd = app.add_subcommand("simulate", "Synthetic session logs (JSON Lines)");
  add_params(simulate_cmd);
  add_model(simulate_cmd);
  add_out(simulate_cmd);
  simulate_cmd->add_option("--n", c.n, "Number of sessions")->capture_default_str();
  simulate_cmd->add_option("--sigma", c.sigma, "Log-normal gain noise")
      ->capture_default_str();
  simulate_cmd->add_option("--seed", c.seed, "Seed")->capture_default_str();
  simulate_cmd->add_option("--q", c.q, "Queries (fixed strategy)");
  simulate_cmd->add_option("--f", c.f, "Feedback rounds (fixed strategy)");
  simulate_cmd->add_option("--a", c.a, "Assessments (fixed strategy)");

  auto* fit = app.add_subcommand("fit", "Estimate parameters from session logs");
  fit->add_option("--logs", c.logs_path, "JSON Lines session logs")->required();
  add_out(fit);
  add_format(fit, {"json", "text"});

  auto* viability_cmd = app.add_subcommand("viability", "Is feedback worth its cost?");
  add_params(viability_cmd);
  add_gain(viability_cmd);
  add_grid(viability_cmd);
  add_out(viability_cmd);
  add_format(viability_cmd, {"json", "text"});

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }

  try {
    if (optimize->parsed()) return cmd_optimize(c, out);
    if (oracle->parsed()) return cmd_oracle(c, out);
    if (audit->parsed()) return cmd_audit(c, out);
    if (sweep_cmd->parsed()) return cmd_sweep(c, out);
    if (simulate_cmd->parsed()) return cmd_simulate(c, out);
    if (fit->parsed()) return cmd_fit(c, out);
    if (viability_cmd->parsed()) return cmd_viability(c, out);
  } catch (const InsufficientDesign& e) {
    err << "error: " << e.what() << '\n';
    return kInsufficientDesign;
  } catch (const NoInteriorOptimum& e) {
    err << "error: " << e.what() << '\n';
    return kNoOptimum;
  } catch (const Unbounded& e) {
    err << "error: " << e.what() << '\n';
    return kNoOptimum;
  } catch (const Diverged& e) {
    err << "error: " << e.what() << '\n';
    return kNoOptimum;
  } catch (const Infeasible& e) {
    err << "error: " << e.what() << '\n';
    return kNoOptimum;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}

}  // namespace convecon::cli
