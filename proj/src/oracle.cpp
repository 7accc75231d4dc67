#include "convecon/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>
#include <vector>

#include "convecon/closed_form.hpp"

namespace convecon {

void check_grid(const GridSpec& grid) {
  if (!(grid.min > 0.0) || !std::isfinite(grid.min))
    throw DomainError("grid min must be finite and > 0");
  if (!(grid.max > grid.min) || !std::isfinite(grid.max))
    throw DomainError("grid max must be finite and > min");
  if (grid.points < 2) throw DomainError("grid points must be >= 2");
  if (grid.refinements < 0) throw DomainError("grid refinements must be >= 0");
}

double lagrangian(ModelKind model, const Strategy& s, const ValidatedParams& p,
                  const GainTarget& g, double lambda) {
  if (s.model != model) throw DomainError("strategy model mismatch");
  return cost(s, p) - lambda * (gain(s, p) - g.value());
}

KktReport kkt_residual(ModelKind model, const Strategy& s,
                       const ValidatedParams& p, const GainTarget& g) {
  if (s.model != model) throw DomainError("strategy model mismatch");
  check_strategy(s);
  if (!(s.q > 0.0) || !(s.a > 0.0))
    throw DomainError("kkt_residual needs q > 0 and a > 0");

  const Gradient dg = gain_gradient(s, p.eff());
  const Gradient dc = cost_gradient(s, p.cost());
  if (!(dg.da != 0.0) || !std::isfinite(dg.da))
    throw DomainError("gain gradient in a is zero");

  KktReport r;
  r.lambda = dc.da / dg.da;
  const double scale = std::sqrt(dc.dq * dc.dq + dc.df * dc.df + dc.da * dc.da);
  r.residual_q = (dc.dq - r.lambda * dg.dq) / scale;
  if (model != ModelKind::Baseline) {
    double rf = (dc.df - r.lambda * dg.df) / scale;
    // F = 0 is an active bound: a positive multiplier on F >= 0 absorbs a
    // positive residual.
    if (s.f == 0.0) rf = std::min(rf, 0.0);
    r.residual_f = rf;
  }
  r.residual_a = 0.0;
  r.residual_max = std::max(std::abs(r.residual_q), std::abs(r.residual_f));
  r.constraint_gap = gain(s, p) / g.value() - 1.0;
  return r;
}

namespace {

struct Candidate {
  double cost = std::numeric_limits<double>::infinity();
  double q = 0.0;
  double f = 0.0;
  double a = 0.0;

  bool better_than(const Candidate& o) const {
    if (cost != o.cost) return cost < o.cost;
    return std::tie(q, f, a) < std::tie(o.q, o.f, o.a);
  }
};

// Window in log10 space; a single point when lo == hi.
struct Window {
  double lo;
  double hi;
};

std::vector<double> axis_values(const Window& w, int points, bool with_zero) {
  std::vector<double> v;
  v.reserve(points + 1);
  if (with_zero) v.push_back(0.0);
  if (w.hi <= w.lo) {
    v.push_back(std::pow(10.0, w.lo));
    return v;
  }
  const double step = (w.hi - w.lo) / (points - 1);
  for (int i = 0; i < points; ++i) {
    const double e = i + 1 == points ? w.hi : w.lo + step * i;
    v.push_back(std::pow(10.0, e));
  }
  return v;
}

Window zoom(const Window& w, double center, double lo_bound, double hi_bound) {
  const double half = (w.hi - w.lo) / 20.0;
  return {std::max(lo_bound, center - half), std::min(hi_bound, center + half)};
}

OptimalStrategy search(ModelKind model, const ValidatedParams& p,
                       const GainTarget& g, const Pin& pin,
                       const GridSpec& grid) {
  check_grid(grid);
  const bool f_free = model != ModelKind::Baseline && !pin.f;
  const bool a_free = !pin.a;
  if (model == ModelKind::Baseline && pin.f && *pin.f != 0.0)
    throw DomainError("f must be 0 for the baseline model");
  if (pin.f && !(*pin.f >= 0.0 && std::isfinite(*pin.f)))
    throw DomainError("pinned f must be finite and >= 0");
  if (pin.a && !(*pin.a > 0.0 && std::isfinite(*pin.a)))
    throw DomainError("pinned a must be finite and > 0");

  const double lo = std::log10(grid.min);
  const double hi = std::log10(grid.max);
  Window fw{lo, hi};
  Window aw{lo, hi};

  GridMeta meta;
  meta.spec = grid;
  Candidate best;
  for (int round = 0; round <= grid.refinements; ++round) {
    std::vector<double> fs =
        f_free ? axis_values(fw, grid.points, true)
               : std::vector<double>{pin.f.value_or(0.0)};
    std::vector<double> as = a_free ? axis_values(aw, grid.points, false)
                                    : std::vector<double>{*pin.a};
    Candidate round_best;
    for (double f : fs) {
      for (double a : as) {
        const double q = recover_q(g, f, a, model, p.eff());
        if (!std::isfinite(q)) continue;
        Candidate c{cost(Strategy{model, q, f, a}, p), q, f, a};
        ++meta.evaluations;
        if (std::isfinite(c.cost) && c.better_than(round_best)) round_best = c;
      }
    }
    if (!std::isfinite(round_best.cost))
      throw Unbounded("no grid point yields a finite cost");
    // Each round's window contains the previous incumbent, so the incumbent
    // can only improve.
    if (round_best.better_than(best)) best = round_best;
    ++meta.rounds;
    if (round == grid.refinements) break;
    if (f_free) fw = zoom(fw, best.f > 0.0 ? std::log10(best.f) : lo, lo, hi);
    if (a_free) aw = zoom(aw, std::log10(best.a), lo, hi);
  }

  const double rel = 1e-12;
  if (a_free && (best.a <= grid.min * (1.0 + rel) ||
                 best.a >= grid.max * (1.0 - rel)))
    throw Unbounded("cost keeps decreasing toward the A grid boundary");
  if (f_free && best.f >= grid.max * (1.0 - rel))
    throw Unbounded("cost keeps decreasing toward the F grid boundary");

  OptimalStrategy out;
  out.strategy = Strategy{model, best.q, best.f, best.a};
  out.achieved_gain = gain(out.strategy, p);
  out.total_cost = best.cost;
  out.kkt = kkt_residual(model, out.strategy, p, g);
  out.grid_meta = meta;
  return out;
}

}  // namespace

OptimalStrategy minimize_cost(ModelKind model, const ValidatedParams& p,
                              const GainTarget& g, const GridSpec& grid) {
  return search(model, p, g, Pin{}, grid);
}

OptimalStrategy minimize_cost_pinned(ModelKind model, const ValidatedParams& p,
                                     const GainTarget& g, const Pin& pin,
                                     const GridSpec& grid) {
  return search(model, p, g, pin, grid);
}

namespace {

std::vector<double> integer_axis(double x, int widen) {
  const double lo = std::max(0.0, std::floor(x) - widen);
  const double hi = std::ceil(x) + widen;
  std::vector<double> v;
  for (double k = lo; k <= hi; k += 1.0) v.push_back(k);
  return v;
}

// Smallest integer Q whose gain reaches the target (within round-off).
double min_feasible_q(const GainTarget& g, double f, double a, ModelKind model,
                      const ValidatedParams& p, double floor_g) {
  double k = std::ceil(recover_q(g, f, a, model, p.eff()) * (1.0 - 1e-12));
  k = std::max(k, 1.0);
  while (k > 1.0 && gain(Strategy{model, k - 1.0, f, a}, p) >= floor_g) k -= 1.0;
  while (gain(Strategy{model, k, f, a}, p) < floor_g) k += 1.0;
  return k;
}

}  // namespace

Strategy integer_refine(const OptimalStrategy& sol, ModelKind model,
                        const ValidatedParams& p, const GainTarget& g,
                        int widen) {
  if (widen < 0) throw DomainError("widen must be >= 0");
  const Strategy& s = sol.strategy;
  if (s.model != model) throw DomainError("strategy model mismatch");
  check_strategy(s);

  const std::vector<double> qs = integer_axis(s.q, widen);
  const std::vector<double> fs = model == ModelKind::Baseline
                                     ? std::vector<double>{0.0}
                                     : integer_axis(s.f, widen);
  const std::vector<double> as = integer_axis(s.a, widen);
  const double q_lo = qs.front();
  const double q_hi = qs.back();
  const double floor_g = g.value() * (1.0 - 1e-12);

  Candidate best;
  for (double f : fs) {
    for (double a : as) {
      if (a <= 0.0) continue;
      const double q = std::max(q_lo, min_feasible_q(g, f, a, model, p, floor_g));
      if (q > q_hi) continue;
      Candidate c{cost(Strategy{model, q, f, a}, p), q, f, a};
      if (c.better_than(best)) best = c;
    }
  }
  if (!std::isfinite(best.cost))
    throw Infeasible("no integer neighbour reaches the gain target");
  return Strategy{model, best.q, best.f, best.a};
}

Strategy integer_solution(const OptimalStrategy& sol, ModelKind model,
                          const ValidatedParams& p, const GainTarget& g) {
  try {
    return integer_refine(sol, model, p, g, 0);
  } catch (const Infeasible&) {
    return integer_refine(sol, model, p, g, 1);
  }
}

}  // namespace convecon
