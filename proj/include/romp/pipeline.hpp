#ifndef ROMP_PIPELINE_HPP
#define ROMP_PIPELINE_HPP

#include <romp/attrs.hpp>
#include <romp/cbha.hpp>
#include <romp/initial_solver.hpp>
#include <romp/mission.hpp>
#include <romp/parallel.hpp>
#include <romp/scenario.hpp>

#include <chrono>
#include <cstddef>

namespace romp
{

/// Prizes on the full 1..u scale, then nodes below l dropped.
[[nodiscard]] inline MissionGraph mission_graph(const Scenario &scenario, const PlannerConfig &config)
{
  const auto nodes = sensor_nodes(scenario, {1, config.prize_upper});
  return build_graph(nodes, scenario.start, scenario.end, config);
}

struct PlanRequest
{
  PlannerConfig planner;
  PdvParams pdv;
  FitnessWeights weights;
  RouteMode mode = RouteMode::op;
  std::size_t workers = 1;
};

struct PlanOutcome
{
  MissionGraph graph;
  Route initial;
  Route route;
  double initial_fitness = 0.0;
  double fitness = 0.0;
  EnergyReport report; // forecast of route
  Attrs attrs;
};

/// Offline planning of one mission: initial solution, then CBHA under the
/// given wind forecast. attrs.t is the wall-clock of these two stages.
[[nodiscard]] inline PlanOutcome plan_mission(const Scenario &scenario, const WindField &forecast,
                                              const PlanRequest &req)
{
  req.planner.validate();
  req.pdv.validate();
  PlanOutcome out{mission_graph(scenario, req.planner), {}, {}, 0.0, 0.0, {}, {}};
  const auto t0 = std::chrono::steady_clock::now();
  out.initial = solve_initial(out.graph, req.pdv, req.planner, req.mode).route;
  const PlanningProblem problem(out.graph, req.pdv, forecast, req.weights, req.planner);
  if (req.mode == RouteMode::op)
  {
    out.route = optimise_route(out.initial, problem, req.planner, req.workers);
    if (problem.evaluate(out.route).excess_wh > 0.0)
    {
      // the still-air route does not fit the forecast; size it under the forecast instead
      InitialSolveOptions windy;
      windy.estimate_field = &forecast;
      out.initial = solve_initial(out.graph, req.pdv, req.planner, req.mode, windy).route;
      out.route = optimise_route(out.initial, problem, req.planner, req.workers);
    }
  }
  else
    out.route = out.initial;
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  out.initial_fitness = problem.evaluate(out.initial).fitness;
  out.fitness = problem.evaluate(out.route).fitness;
  out.report = mission_energy(out.route, out.graph, req.pdv, forecast);
  out.attrs = compute_attrs(out.report, out.graph, req.pdv.battery_energy, elapsed);
  return out;
}

} // namespace romp

#endif
