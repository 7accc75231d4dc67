#pragma once

#include <optional>

#include "convecon/model.hpp"

// Exhaustive constrained minimisation: minimise cost subject to
// gain == G. Q is eliminated through the constraint, so the search runs over
// (F, A) or over A alone.

namespace convecon {

/// Logarithmic grid per free axis. The F axis always carries 0 as an extra
/// candidate so the no-feedback corner is representable.
struct GridSpec {
  double min = 1e-3;
  double max = 1e4;
  int points = 200;
  int refinements = 3;
};

void check_grid(const GridSpec& grid);

struct GridMeta {
  GridSpec spec;
  int rounds = 0;           // coarse round plus refinements
  std::size_t evaluations = 0;
};

struct KktReport {
  double lambda = 0.0;
  double residual_q = 0.0;
  double residual_f = 0.0;
  double residual_a = 0.0;  // zero by construction of lambda
  double residual_max = 0.0;
  double constraint_gap = 0.0;  // gain / G - 1
};

struct OptimalStrategy {
  Strategy strategy;
  double achieved_gain = 0.0;
  double total_cost = 0.0;
  KktReport kkt;
  std::optional<Strategy> integer_neighbor;
  GridMeta grid_meta;
};

/// cost(s) - lambda (gain(s) - G).
double lagrangian(ModelKind model, const Strategy& s, const ValidatedParams& p,
                  const GainTarget& g, double lambda);

/// First-order diagnostics with lambda taken from the A coordinate.
/// Residuals are normalised by the Euclidean norm of the cost gradient.
/// Q and A must be positive. For the feedback models F = 0 is accepted as an
/// active bound and only a negative F residual counts.
KktReport kkt_residual(ModelKind model, const Strategy& s,
                       const ValidatedParams& p, const GainTarget& g);

/// Joint minimisation over every free coordinate of `model`.
/// Throws Unbounded when the final incumbent touches the outer grid bound of
/// a free axis (other than F = 0).
OptimalStrategy minimize_cost(ModelKind model, const ValidatedParams& p,
                              const GainTarget& g, const GridSpec& grid = {});

/// Coordinates held fixed during a conditional minimisation.
struct Pin {
  std::optional<double> f;
  std::optional<double> a;
};

/// Minimisation with some of (F, A) held fixed: the conditional optimum of
/// the free coordinates.
OptimalStrategy minimize_cost_pinned(ModelKind model, const ValidatedParams& p,
                                     const GainTarget& g, const Pin& pin,
                                     const GridSpec& grid = {});

/// Least-cost feasible integer point among the floor/ceil combinations of
/// (q, f, a), widened by `widen` units per axis. Q may be raised to the next
/// integer that meets the target as long as it stays inside the Q range of
/// the neighbourhood. Throws Infeasible otherwise.
Strategy integer_refine(const OptimalStrategy& sol, ModelKind model,
                        const ValidatedParams& p, const GainTarget& g,
                        int widen = 0);

/// integer_refine, retried once with the neighbourhood widened by one unit.
Strategy integer_solution(const OptimalStrategy& sol, ModelKind model,
                          const ValidatedParams& p, const GainTarget& g);

}  // namespace convecon
