#ifndef ROMP_INITIAL_SOLVER_HPP
#define ROMP_INITIAL_SOLVER_HPP

#include <romp/energy.hpp>
#include <romp/model.hpp>
#include <romp/wind.hpp>

#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace romp
{

class InfeasibleMissionError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Guided local search memory. Features are undirected edges between graph
/// vertices (nodes plus the start/end sentinels).
struct GlsState
{
  std::size_t vertices = 0;
  std::vector<int> penalties; // vertices x vertices, symmetric
  double lambda = 0.0;
  double augmented_cost = 0.0;

  explicit GlsState(const MissionGraph &graph)
      : vertices(graph.size() + 2), penalties(vertices * vertices, 0)
  {
  }

  [[nodiscard]] int penalty(std::size_t a, std::size_t b) const noexcept { return penalties[a * vertices + b]; }
  void bump(std::size_t a, std::size_t b) noexcept
  {
    ++penalties[a * vertices + b];
    ++penalties[b * vertices + a];
  }
};

namespace detail
{
// Vertex sequence start, visits..., end.
inline std::vector<std::size_t> as_path(const Route &route, const MissionGraph &graph)
{
  std::vector<std::size_t> p;
  p.reserve(route.size() + 2);
  p.push_back(graph.start_index());
  p.insert(p.end(), route.visits.begin(), route.visits.end());
  p.push_back(graph.end_index());
  return p;
}

inline double path_length(const std::vector<std::size_t> &p, const MissionGraph &graph)
{
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < p.size(); ++i)
    s += graph.dist(p[i], p[i + 1]);
  return s;
}

/// Best-improvement descent over 2-opt and relocate moves with cost(a, b).
template <typename Cost>
void local_descent(std::vector<std::size_t> &p, const Cost &cost)
{
  const std::size_t n = p.size() - 2;
  if (n < 2)
    return;
  constexpr double eps = 1e-9;
  for (;;)
  {
    double best = -eps;
    int kind = 0; // 1: 2-opt, 2: relocate
    std::size_t ba = 0, bb = 0;

    // reverse p[a..b]
    for (std::size_t a = 1; a < n; ++a)
      for (std::size_t b = a + 1; b <= n; ++b)
      {
        const double d = cost(p[a - 1], p[b]) + cost(p[a], p[b + 1]) - cost(p[a - 1], p[a]) - cost(p[b], p[b + 1]);
        if (d < best)
        {
          best = d;
          kind = 1;
          ba = a;
          bb = b;
        }
      }
    // move p[a] to sit between p[b] and p[b + 1]
    for (std::size_t a = 1; a <= n; ++a)
    {
      const double removed = cost(p[a - 1], p[a + 1]) - cost(p[a - 1], p[a]) - cost(p[a], p[a + 1]);
      for (std::size_t b = 0; b <= n; ++b)
      {
        if (b == a || b + 1 == a)
          continue;
        const double d = removed + cost(p[b], p[a]) + cost(p[a], p[b + 1]) - cost(p[b], p[b + 1]);
        if (d < best)
        {
          best = d;
          kind = 2;
          ba = a;
          bb = b;
        }
      }
    }

    if (kind == 0)
      return;
    if (kind == 1)
      std::reverse(p.begin() + static_cast<std::ptrdiff_t>(ba), p.begin() + static_cast<std::ptrdiff_t>(bb) + 1);
    else
    {
      const std::size_t v = p[ba];
      p.erase(p.begin() + static_cast<std::ptrdiff_t>(ba));
      const std::size_t slot = bb < ba ? bb + 1 : bb;
      p.insert(p.begin() + static_cast<std::ptrdiff_t>(slot), v);
    }
  }
}

inline Route from_path(const std::vector<std::size_t> &p)
{
  return Route{std::vector<std::size_t>(p.begin() + 1, p.end() - 1)};
}
} // namespace detail

/// Guided local search over the route's own node set. Each iteration descends
/// to a local minimum of the augmented cost, then penalizes the edge with the
/// largest length / (1 + penalty). The shortest route seen is returned, so the
/// true distance never grows.
[[nodiscard]] inline Route gls_improve(const Route &route, const MissionGraph &graph, GlsState &state,
                                       std::size_t iterations, double lambda_factor = 0.1)
{
  detail::check_membership(route, graph);
  auto path = detail::as_path(route, graph);
  auto best = path;
  double best_len = detail::path_length(path, graph);
  if (route.size() < 2)
    return route;

  auto true_cost = [&](std::size_t a, std::size_t b) { return graph.dist(a, b); };
  detail::local_descent(path, true_cost);
  if (const double len = detail::path_length(path, graph); len < best_len)
  {
    best_len = len;
    best = path;
  }
  state.lambda = lambda_factor * detail::path_length(path, graph) / static_cast<double>(path.size() - 1);

  auto aug_cost = [&](std::size_t a, std::size_t b) {
    return graph.dist(a, b) + state.lambda * state.penalty(a, b);
  };

  for (std::size_t it = 0; it < iterations; ++it)
  {
    // penalize the max-utility edge of the current local minimum
    double best_util = -1.0;
    std::size_t ea = 0, eb = 0;
    for (std::size_t i = 0; i + 1 < path.size(); ++i)
    {
      const std::size_t a = std::min(path[i], path[i + 1]);
      const std::size_t b = std::max(path[i], path[i + 1]);
      const double util = graph.dist(a, b) / (1.0 + state.penalty(a, b));
      if (util > best_util || (util == best_util && std::pair{a, b} < std::pair{ea, eb}))
      {
        best_util = util;
        ea = a;
        eb = b;
      }
    }
    state.bump(ea, eb);

    detail::local_descent(path, aug_cost);
    if (const double len = detail::path_length(path, graph); len < best_len - 1e-12)
    {
      best_len = len;
      best = path;
    }
  }

  double aug = 0.0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i)
    aug += aug_cost(path[i], path[i + 1]);
  state.augmented_cost = aug;
  return detail::from_path(best);
}

/// Next target prize after an over-budget estimate. Large gaps take the large
/// step; the result never drops below `floor`.
[[nodiscard]] inline int reduce_target_prize(int current_target, double energy_gap_wh, const PlannerConfig &config,
                                             int floor)
{
  if (current_target <= floor)
    return floor;
  const int step = energy_gap_wh > config.prize_step_large_gap_wh ? config.prize_step_large : config.prize_step_small;
  return std::max(current_target - step, floor);
}

/// Prize-ordered node retention. Nodes are taken by prize (highest first,
/// ties by cheapest insertion into the tour built so far, then lower index)
/// until the collected prize reaches the target. A node that would push the
/// total past w_max is skipped. The result is in cheapest-insertion tour order.
[[nodiscard]] inline std::vector<std::size_t> drop_selection(const MissionGraph &graph, int target_prize,
                                                             int prize_budget)
{
  std::vector<std::size_t> path{graph.start_index(), graph.end_index()};
  if (target_prize <= 0)
    return {};

  std::vector<char> open(graph.size(), 1);
  int collected = 0;
  auto insertion = [&](std::size_t v) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t slot = 1;
    for (std::size_t i = 0; i + 1 < path.size(); ++i)
    {
      const double d = graph.dist(path[i], v) + graph.dist(v, path[i + 1]) - graph.dist(path[i], path[i + 1]);
      if (d < best)
      {
        best = d;
        slot = i + 1;
      }
    }
    return std::pair{best, slot};
  };

  while (collected < target_prize)
  {
    std::optional<std::size_t> pick;
    double pick_cost = 0.0;
    std::size_t pick_slot = 0;
    for (std::size_t v = 0; v < graph.size(); ++v)
    {
      if (!open[v])
        continue;
      const int p = graph.node(v).prize;
      if (collected + p > prize_budget)
      {
        open[v] = 0;
        continue;
      }
      if (pick && p < graph.node(*pick).prize)
        continue;
      const auto [cost, slot] = insertion(v);
      if (!pick || p > graph.node(*pick).prize || cost < pick_cost)
      {
        pick = v;
        pick_cost = cost;
        pick_slot = slot;
      }
    }
    if (!pick)
      break;
    open[*pick] = 0;
    collected += graph.node(*pick).prize;
    path.insert(path.begin() + static_cast<std::ptrdiff_t>(pick_slot), *pick);
  }
  return {path.begin() + 1, path.end() - 1};
}

/// Inserts further nodes, highest prize first at their cheapest slot, while
/// the prize budget and the energy budget still hold.
template <class Fits>
[[nodiscard]] Route top_up(Route route, const MissionGraph &graph, int prize_budget, Fits fits)
{
  std::vector<char> in(graph.size(), 0);
  int collected = 0;
  for (auto v : route.visits)
  {
    in[v] = 1;
    collected += graph.node(v).prize;
  }
  for (bool grew = true; grew;)
  {
    grew = false;
    struct Cand
    {
      std::size_t v;
      double cost;
      std::size_t slot;
    };
    std::vector<Cand> cands;
    std::vector<std::size_t> path{graph.start_index()};
    path.insert(path.end(), route.visits.begin(), route.visits.end());
    path.push_back(graph.end_index());
    for (std::size_t v = 0; v < graph.size(); ++v)
    {
      if (in[v] || collected + graph.node(v).prize > prize_budget)
        continue;
      Cand c{v, std::numeric_limits<double>::infinity(), 0};
      for (std::size_t i = 0; i + 1 < path.size(); ++i)
      {
        const double d = graph.dist(path[i], v) + graph.dist(v, path[i + 1]) - graph.dist(path[i], path[i + 1]);
        if (d < c.cost)
        {
          c.cost = d;
          c.slot = i;
        }
      }
      cands.push_back(c);
    }
    std::sort(cands.begin(), cands.end(), [&](const Cand &a, const Cand &b) {
      const int pa = graph.node(a.v).prize, pb = graph.node(b.v).prize;
      return pa != pb ? pa > pb : (a.cost != b.cost ? a.cost < b.cost : a.v < b.v);
    });
    for (const auto &c : cands)
    {
      Route trial = route;
      trial.visits.insert(trial.visits.begin() + static_cast<std::ptrdiff_t>(c.slot), c.v);
      if (!fits(trial))
        continue;
      route = std::move(trial);
      in[c.v] = 1;
      collected += graph.node(c.v).prize;
      grew = true;
      break;
    }
  }
  return route;
}

struct InitialSolveOptions
{
  /// Defaults to e_de_cap_fraction * battery_energy.
  std::optional<EnergyBudget> budget;
  /// Field for the feasibility estimate; still air when empty.
  const WindField *estimate_field = nullptr;
  double t0 = 0.0;
};

struct InitialSolution
{
  Route route;
  int target_prize = 0;
  int rounds = 0;
  EnergyReport estimate;
};

/// TSP mode orders every node. OP mode shrinks a prize target until the
/// estimated mission fits the energy budget.
[[nodiscard]] inline InitialSolution solve_initial(const MissionGraph &graph, const PdvParams &pdv,
                                                   const PlannerConfig &config, RouteMode mode,
                                                   const InitialSolveOptions &options = {})
{
  if (graph.size() == 0)
    throw EmptyGraphError("solve_initial: empty graph");
  const WindField still = WindField::still();
  const WindField &field = options.estimate_field ? *options.estimate_field : still;
  const EnergyBudget budget =
      options.budget.value_or(EnergyBudget{config.e_de_cap_fraction * pdv.battery_energy});
  const MissionEnergyOptions est_opts{true, options.t0, true};

  auto order = [&](std::vector<std::size_t> kept) {
    GlsState state(graph);
    const auto iters = static_cast<std::size_t>(config.gls_iterations_per_node) * kept.size();
    return gls_improve(Route{std::move(kept)}, graph, state, iters, config.gls_lambda_factor);
  };

  InitialSolution sol;
  if (mode == RouteMode::tsp)
  {
    sol.route = order(drop_selection(graph, graph.total_prize(), std::numeric_limits<int>::max()));
    sol.target_prize = graph.total_prize();
    sol.rounds = 1;
    sol.estimate = mission_energy(sol.route, graph, pdv, field, est_opts);
    return sol;
  }

  auto fits = [&](const Route &r) {
    const EnergyReport rep = mission_energy(r, graph, pdv, field, est_opts);
    return budget_excess(r, graph, pdv, field, rep, budget, options.t0) <= 0.0;
  };
  auto finish = [&](Route r) {
    r = top_up(std::move(r), graph, config.prize_budget, fits);
    Route shorter = order(r.visits);
    if (fits(shorter))
      r = std::move(shorter);
    sol.route = std::move(r);
    sol.estimate = mission_energy(sol.route, graph, pdv, field, est_opts);
    return sol;
  };

  int floor = 0;
  for (const auto &n : graph.nodes())
    floor = std::max(floor, n.prize);
  int target = std::min(config.prize_budget, graph.total_prize());
  target = std::max(target, std::min(floor, config.prize_budget));

  for (;;)
  {
    ++sol.rounds;
    Route r = order(drop_selection(graph, target, config.prize_budget));
    EnergyReport rep = mission_energy(r, graph, pdv, field, est_opts);
    const double excess = budget_excess(r, graph, pdv, field, rep, budget, options.t0);
    if (excess <= 0.0 && !r.empty())
    {
      sol.target_prize = target;
      return finish(std::move(r));
    }
    if (target <= floor)
      break;
    target = reduce_target_prize(target, excess, config, floor);
  }

  // The highest-prize node alone does not fit; fall back to the best single
  // node that does.
  std::optional<std::size_t> best;
  double best_energy = 0.0;
  for (std::size_t v = 0; v < graph.size(); ++v)
  {
    if (graph.node(v).prize > config.prize_budget)
      continue;
    Route r{{v}};
    EnergyReport rep = mission_energy(r, graph, pdv, field, est_opts);
    if (budget_excess(r, graph, pdv, field, rep, budget, options.t0) > 0.0)
      continue;
    const bool better = !best || graph.node(v).prize > graph.node(*best).prize ||
                        (graph.node(v).prize == graph.node(*best).prize && rep.discharged() < best_energy);
    if (better)
    {
      best = v;
      best_energy = rep.discharged();
      sol.estimate = std::move(rep);
    }
  }
  if (!best)
    throw InfeasibleMissionError("solve_initial: no single-node mission fits the energy budget");
  sol.target_prize = graph.node(*best).prize;
  return finish(Route{{*best}});
}

} // namespace romp

#endif
