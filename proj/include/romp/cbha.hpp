#ifndef ROMP_CBHA_HPP
#define ROMP_CBHA_HPP

#include <romp/energy.hpp>
#include <romp/model.hpp>
#include <romp/wind.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace romp
{

struct FitnessWeights
{
  double w_re = 50.0;
  double w_de = 50.0;
};

enum class Strategy
{
  charge_more,
  balance,
  save_energy
};

[[nodiscard]] inline FitnessWeights weights_for(Strategy s) noexcept
{
  switch (s)
  {
  case Strategy::charge_more:
    return {80.0, 20.0};
  case Strategy::save_energy:
    return {20.0, 80.0};
  case Strategy::balance:
    break;
  }
  return {50.0, 50.0};
}

[[nodiscard]] inline std::optional<Strategy> parse_strategy(std::string_view name) noexcept
{
  if (name == "charge-more")
    return Strategy::charge_more;
  if (name == "balance")
    return Strategy::balance;
  if (name == "save-energy")
    return Strategy::save_energy;
  return std::nullopt;
}

[[nodiscard]] inline std::string_view to_string(Strategy s) noexcept
{
  switch (s)
  {
  case Strategy::charge_more:
    return "charge-more";
  case Strategy::save_energy:
    return "save-energy";
  case Strategy::balance:
    break;
  }
  return "balance";
}

/// Distances below one metre are scored as one metre.
inline constexpr double min_log_distance = 1.0;

/// Score of node `candidate` placed between graph vertices prev and next.
[[nodiscard]] inline double candidate_fitness(std::size_t candidate, std::size_t prev, std::size_t next,
                                              const MissionGraph &graph, FitnessWeights w, int prize_lower)
{
  const double d = std::max(graph.dist(prev, candidate) + graph.dist(candidate, next), min_log_distance);
  return w.w_re * (graph.node(candidate).prize - prize_lower) - w.w_de * std::log10(d);
}

/// Graph vertices adjacent to route position i (start/end sentinels at the ends).
[[nodiscard]] inline std::pair<std::size_t, std::size_t> route_neighbours(const Route &route, std::size_t i,
                                                                          const MissionGraph &graph)
{
  const std::size_t prev = i == 0 ? graph.start_index() : route.visits[i - 1];
  const std::size_t next = i + 1 >= route.size() ? graph.end_index() : route.visits[i + 1];
  return {prev, next};
}

[[nodiscard]] inline double candidate_fitness(std::size_t candidate, std::size_t i, const Route &route,
                                              const MissionGraph &graph, FitnessWeights w, int prize_lower)
{
  const auto [prev, next] = route_neighbours(route, i, graph);
  return candidate_fitness(candidate, prev, next, graph, w, prize_lower);
}

/// Top-N substitutes for route position i, best first. Nodes currently at
/// i-1 and i+1 are never listed. Ties keep the lower index first.
[[nodiscard]] inline std::vector<std::size_t> candidate_list(const Route &route, std::size_t i,
                                                             const MissionGraph &graph, FitnessWeights w,
                                                             int prize_lower, std::size_t search_number)
{
  if (i >= route.size())
    throw std::out_of_range("candidate_list: index outside route");
  const auto [prev, next] = route_neighbours(route, i, graph);
  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(graph.size());
  for (std::size_t m = 0; m < graph.size(); ++m)
  {
    if (m == prev || m == next)
      continue;
    scored.emplace_back(candidate_fitness(m, prev, next, graph, w, prize_lower), m);
  }
  const std::size_t keep = std::min(search_number, scored.size());
  auto by_score = [](const auto &a, const auto &b) { return a.first > b.first || (a.first == b.first && a.second < b.second); };
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep), scored.end(), by_score);
  std::vector<std::size_t> out(keep);
  for (std::size_t k = 0; k < keep; ++k)
    out[k] = scored[k].second;
  return out;
}

[[nodiscard]] inline double total_rechargeable(const MissionGraph &graph)
{
  double s = 0.0;
  for (const auto &n : graph.nodes())
    s += recharged_energy(n);
  return s;
}

/// W_re * (recharged share of the graph) - W_de * (discharged / e_initial).
[[nodiscard]] inline double solution_fitness(const EnergyReport &report, double graph_rechargeable,
                                             FitnessWeights w, double e_initial)
{
  if (!(graph_rechargeable > 0.0))
    throw std::domain_error("solution_fitness: graph has no rechargeable energy");
  if (!(e_initial > 0.0))
    throw std::domain_error("solution_fitness: initial energy must be positive");
  return w.w_re * (report.e_recharged / graph_rechargeable) - w.w_de * (report.discharged() / e_initial);
}

[[nodiscard]] inline double solution_fitness(const Route &route, const MissionGraph &graph, const PdvParams &pdv,
                                             const WindField &field, FitnessWeights w, double e_initial,
                                             double t0 = 0.0)
{
  const EnergyReport rep = mission_energy(route, graph, pdv, field, {true, t0, false});
  return solution_fitness(rep, total_rechargeable(graph), w, e_initial);
}

/// Nearest-rank third quartile: element ceil(0.75 N) of the ascending sort.
[[nodiscard]] inline double event_horizon(std::span<const double> metrics)
{
  if (metrics.empty())
    throw std::invalid_argument("event_horizon: no metrics");
  std::vector<double> sorted(metrics.begin(), metrics.end());
  const auto rank = static_cast<std::size_t>(std::ceil(0.75 * static_cast<double>(sorted.size())));
  const std::size_t idx = std::max<std::size_t>(rank, 1) - 1;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(idx), sorted.end());
  return sorted[idx];
}

/// Everything a route is scored against during one planning run.
class PlanningProblem
{
public:
  PlanningProblem(const MissionGraph &graph, const PdvParams &pdv, const WindField &field, FitnessWeights weights,
                  double e_initial, EnergyBudget budget, int prize_lower, int prize_budget, double t0 = 0.0)
      : graph_(&graph), pdv_(pdv), field_(&field), weights_(weights), e_initial_(e_initial), budget_(budget),
        prize_lower_(prize_lower), prize_budget_(prize_budget), t0_(t0), rechargeable_(total_rechargeable(graph))
  {
    if (!(rechargeable_ > 0.0))
      throw std::domain_error("PlanningProblem: graph has no rechargeable energy");
  }

  /// Offline defaults: budget = cap_fraction * battery, e_initial = battery.
  PlanningProblem(const MissionGraph &graph, const PdvParams &pdv, const WindField &field, FitnessWeights weights,
                  const PlannerConfig &config)
      : PlanningProblem(graph, pdv, field, weights, pdv.battery_energy,
                        EnergyBudget{config.e_de_cap_fraction * pdv.battery_energy}, config.prize_lower,
                        config.prize_budget)
  {
  }

  // graph and field are held by reference
  PlanningProblem(const MissionGraph &, const PdvParams &, WindField &&, FitnessWeights, double, EnergyBudget, int, int,
                  double = 0.0) = delete;
  PlanningProblem(MissionGraph &&, const PdvParams &, const WindField &, FitnessWeights, double, EnergyBudget, int,
                  int, double = 0.0) = delete;
  PlanningProblem(const MissionGraph &, const PdvParams &, WindField &&, FitnessWeights,
                  const PlannerConfig &) = delete;
  PlanningProblem(MissionGraph &&, const PdvParams &, const WindField &, FitnessWeights,
                  const PlannerConfig &) = delete;

  [[nodiscard]] const MissionGraph &graph() const noexcept { return *graph_; }
  [[nodiscard]] const PdvParams &pdv() const noexcept { return pdv_; }
  [[nodiscard]] const WindField &field() const noexcept { return *field_; }
  [[nodiscard]] FitnessWeights weights() const noexcept { return weights_; }
  [[nodiscard]] double e_initial() const noexcept { return e_initial_; }
  [[nodiscard]] const EnergyBudget &budget() const noexcept { return budget_; }
  [[nodiscard]] int prize_lower() const noexcept { return prize_lower_; }
  [[nodiscard]] int prize_budget() const noexcept { return prize_budget_; }
  [[nodiscard]] double t0() const noexcept { return t0_; }
  [[nodiscard]] double rechargeable() const noexcept { return rechargeable_; }

  struct Evaluation
  {
    double fitness = 0.0;
    double excess_wh = 0.0; // > 0 when the budget is broken
    double metric = 0.0;    // fitness, pushed below every feasible value when infeasible
  };

  [[nodiscard]] Evaluation evaluate(const Route &route) const
  {
    const EnergyReport rep = mission_energy(route, *graph_, pdv_, *field_, {true, t0_, budget_.checks_reserve()});
    Evaluation e;
    e.fitness = solution_fitness(rep, rechargeable_, weights_, e_initial_);
    e.excess_wh = budget_excess(route, *graph_, pdv_, *field_, rep, budget_, t0_);
    e.metric = e.fitness;
    if (e.excess_wh > 0.0)
    {
      // feasible fitness is >= -w_de whenever the cap is within e_initial
      const double scale = weights_.w_re + weights_.w_de;
      e.metric -= scale * (2.0 + 1000.0 * e.excess_wh / e_initial_);
    }
    return e;
  }

  [[nodiscard]] double metric(const Route &route) const { return evaluate(route).metric; }

private:
  const MissionGraph *graph_;
  PdvParams pdv_;
  const WindField *field_;
  FitnessWeights weights_;
  double e_initial_;
  EnergyBudget budget_;
  int prize_lower_;
  int prize_budget_;
  double t0_;
  double rechargeable_;
};

using Rng = std::mt19937_64;

[[nodiscard]] inline double uniform01(Rng &rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

struct AttractParams
{
  double attraction_probability = 0.75;
  std::size_t search_number = 10;
};

/// One attraction step on position k. With probability P_a a virtual point is
/// dropped on the segment from the member's node toward the black hole's node
/// at k; the candidate closest to it takes position k. A candidate already in
/// the route trades places with the displaced node; a new node replaces it
/// only if the prize budget still holds. Returns true when the route changed.
inline bool attract(Route &member, const Route &black_hole, std::size_t k, const PlanningProblem &problem,
                    const AttractParams &params, Rng &rng)
{
  if (k >= member.size())
    throw std::out_of_range("attract: index outside route");
  if (!(uniform01(rng) < params.attraction_probability))
    return false;

  const MissionGraph &graph = problem.graph();
  const auto cl =
      candidate_list(member, k, graph, problem.weights(), problem.prize_lower(), params.search_number);
  if (cl.empty())
    return false;

  const double frac = uniform01(rng);
  const Vec3 here = graph.position(member.visits[k]);
  const Vec3 toward = k < black_hole.size() ? graph.position(black_hole.visits[k]) : here;
  const Vec3 virtual_point = here + frac * (toward - here);

  std::size_t pick = cl.front();
  double pick_d = std::numeric_limits<double>::infinity();
  for (auto c : cl)
  {
    const double d = ground_distance(graph.position(c), virtual_point);
    if (d < pick_d || (d == pick_d && c < pick))
    {
      pick = c;
      pick_d = d;
    }
  }

  const std::size_t old = member.visits[k];
  if (pick == old)
    return false;
  auto it = std::find(member.visits.begin(), member.visits.end(), pick);
  if (it != member.visits.end())
  {
    *it = old;
    member.visits[k] = pick;
    return true;
  }
  const int prize = route_collected_prize(member, graph) - graph.node(old).prize + graph.node(pick).prize;
  if (prize > problem.prize_budget())
    return false;
  member.visits[k] = pick;
  return true;
}

/// `swaps` random transpositions of the route's positions.
inline void random_index_swaps(Route &route, int swaps, Rng &rng)
{
  if (route.size() < 2)
    return;
  std::uniform_int_distribution<std::size_t> pick(0, route.size() - 1);
  for (int s = 0; s < swaps; ++s)
  {
    const std::size_t a = pick(rng);
    std::size_t b = pick(rng);
    while (b == a)
      b = pick(rng);
    std::swap(route.visits[a], route.visits[b]);
  }
}

struct Population
{
  std::vector<Route> members;
  std::vector<double> metrics;
  Route black_hole;
  double black_hole_metric = -std::numeric_limits<double>::infinity();
  std::size_t black_hole_member = 0;

  /// Promotes the best member (lowest index on ties) if it strictly beats the
  /// current black hole. The black-hole member always carries its metric.
  void update_black_hole()
  {
    std::size_t best = black_hole_member;
    for (std::size_t j = 0; j < members.size(); ++j)
      if (metrics[j] > metrics[best])
        best = j;
    if (best != black_hole_member)
    {
      black_hole_member = best;
      black_hole = members[best];
      black_hole_metric = metrics[best];
    }
  }
};

/// Re-seeds every member whose metric is below r from the initial route. The
/// black-hole member is kept. Returns the number of members re-seeded.
inline std::size_t absorb(Population &pop, double r, const Route &initial, const PlanningProblem &problem,
                          int init_swaps, Rng &rng)
{
  std::size_t count = 0;
  for (std::size_t j = 0; j < pop.members.size(); ++j)
  {
    if (j == pop.black_hole_member || !(pop.metrics[j] < r))
      continue;
    pop.members[j] = initial;
    random_index_swaps(pop.members[j], init_swaps, rng);
    pop.metrics[j] = problem.metric(pop.members[j]);
    ++count;
  }
  return count;
}

/// Serial CBHA stepped one generation at a time.
class CbhaEngine
{
public:
  CbhaEngine(const PlanningProblem &problem, Route initial, const PlannerConfig &config, std::size_t population,
             std::uint64_t seed)
      : problem_(&problem), initial_(std::move(initial)), rng_(seed), init_swaps_(config.init_swaps),
        attract_{config.attraction_probability, static_cast<std::size_t>(config.search_number)}
  {
    if (population == 0)
      throw std::invalid_argument("CbhaEngine: empty population");
    pop_.members.assign(population, initial_);
    pop_.metrics.assign(population, 0.0);
    pop_.metrics[0] = problem.metric(initial_);
    for (std::size_t j = 1; j < population; ++j)
    {
      random_index_swaps(pop_.members[j], init_swaps_, rng_);
      pop_.metrics[j] = pop_.members[j] == initial_ ? pop_.metrics[0] : problem.metric(pop_.members[j]);
    }
    pop_.black_hole_member = 0;
    pop_.black_hole = initial_;
    pop_.black_hole_metric = pop_.metrics[0];
    pop_.update_black_hole();
  }

  void step()
  {
    for (std::size_t j = 0; j < pop_.members.size(); ++j)
    {
      if (j == pop_.black_hole_member)
        continue;
      bool changed = false;
      for (std::size_t k = 0; k < pop_.members[j].size(); ++k)
        changed |= attract(pop_.members[j], pop_.black_hole, k, *problem_, attract_, rng_);
      if (changed)
        pop_.metrics[j] = problem_->metric(pop_.members[j]);
    }
    pop_.update_black_hole();
    last_radius_ = event_horizon(pop_.metrics);
    absorb(pop_, last_radius_, initial_, *problem_, init_swaps_, rng_);
    pop_.update_black_hole();
    ++generation_;
  }

  /// Replaces the black hole (and its member slot) with an external route.
  void adopt(const Route &route, double metric)
  {
    pop_.members[pop_.black_hole_member] = route;
    pop_.metrics[pop_.black_hole_member] = metric;
    pop_.black_hole = route;
    pop_.black_hole_metric = metric;
  }

  [[nodiscard]] const Population &population() const noexcept { return pop_; }
  [[nodiscard]] const Route &black_hole() const noexcept { return pop_.black_hole; }
  [[nodiscard]] double black_hole_metric() const noexcept { return pop_.black_hole_metric; }
  [[nodiscard]] int generation() const noexcept { return generation_; }
  [[nodiscard]] double last_radius() const noexcept { return last_radius_; }

private:
  const PlanningProblem *problem_;
  Route initial_;
  Rng rng_;
  int init_swaps_;
  AttractParams attract_;
  Population pop_;
  int generation_ = 0;
  double last_radius_ = 0.0;
};

struct EvolveResult
{
  Route route;
  double fitness = 0.0;         // pure solution fitness of route
  double initial_fitness = 0.0; // same, of the input route
  double metric = 0.0;          // black-hole metric (fitness unless infeasible)
  std::vector<double> history;  // black-hole metric after each generation, index 0 = start
};

[[nodiscard]] inline EvolveResult evolve(const Route &initial, const PlanningProblem &problem,
                                         const PlannerConfig &config, std::uint64_t seed)
{
  EvolveResult out;
  out.initial_fitness = problem.evaluate(initial).fitness;
  if (config.generations == 0 || initial.empty())
  {
    out.route = initial;
    out.fitness = out.initial_fitness;
    out.metric = problem.metric(initial);
    out.history = {out.metric};
    return out;
  }
  CbhaEngine engine(problem, initial, config, static_cast<std::size_t>(config.population), seed);
  out.history.reserve(static_cast<std::size_t>(config.generations) + 1);
  out.history.push_back(engine.black_hole_metric());
  for (int g = 0; g < config.generations; ++g)
  {
    engine.step();
    out.history.push_back(engine.black_hole_metric());
  }
  out.route = engine.black_hole();
  out.metric = engine.black_hole_metric();
  out.fitness = problem.evaluate(out.route).fitness;
  return out;
}

} // namespace romp

#endif
