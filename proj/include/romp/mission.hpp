#ifndef ROMP_MISSION_HPP
#define ROMP_MISSION_HPP

#include <romp/cbha.hpp>
#include <romp/energy.hpp>
#include <romp/initial_solver.hpp>
#include <romp/model.hpp>
#include <romp/parallel.hpp>
#include <romp/scenario.hpp>
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

/// Injected change of the on-board energy, standing in for telemetry.
struct EnergyEvent
{
  enum class Trigger
  {
    after_charges,
    at_time
  };
  Trigger trigger = Trigger::after_charges;
  int after_charges = 0;
  double at_time = 0.0; // s
  double new_remaining_wh = 0.0;
};

struct PdvState
{
  Vec3 position;
  double remaining_wh = 0.0;
  double time = 0.0;
  std::vector<std::size_t> visited; // graph indices
};

enum class MissionEventKind
{
  leg,
  charge,
  energy_event,
  check,
  replan,
  rth,
  failure,
  arrived
};

[[nodiscard]] inline const char *to_string(MissionEventKind k) noexcept
{
  switch (k)
  {
  case MissionEventKind::leg:
    return "leg";
  case MissionEventKind::charge:
    return "charge";
  case MissionEventKind::energy_event:
    return "energy_event";
  case MissionEventKind::check:
    return "check";
  case MissionEventKind::replan:
    return "replan";
  case MissionEventKind::rth:
    return "rth";
  case MissionEventKind::failure:
    return "failure";
  case MissionEventKind::arrived:
    return "arrived";
  }
  return "?";
}

struct MissionEvent
{
  MissionEventKind kind = MissionEventKind::leg;
  double time = 0.0;
  Vec3 position;
  int node_id = -1;
  double energy_used_wh = 0.0;  // decrement applied by this record
  double remaining_wh = 0.0;    // after the record
  double estimate_wh = 0.0;     // check/replan: estimate to the end, including the return leg
  double reserve_wh = 0.0;      // check/replan: largest return-to-home reserve along the plan
  std::vector<int> plan;        // replan: new visit order (sensor ids)
};

struct MissionLog
{
  std::vector<MissionEvent> events;
  EnergyReport report; // what was actually flown
  double initial_wh = 0.0;
  double final_wh = 0.0;
  int replans = 0;
  bool completed = false;
  bool failed = false;
  bool returned_early = false;
  std::vector<std::size_t> visited;
};

struct ReplanConfig
{
  PlannerConfig planner = [] {
    PlannerConfig c;
    c.population = 40;
    c.generations = 40;
    return c;
  }();
  FitnessWeights weights;
  double reserve_factor = 1.2;
  double reserve_floor_wh = 5.0;
  std::size_t workers = 1;
  double tolerance_wh = 1e-9;

  [[nodiscard]] EnergyBudget budget_for(double on_board_wh) const noexcept
  {
    return {on_board_wh, on_board_wh, reserve_factor, reserve_floor_wh};
  }
};

struct CheckResult
{
  bool replanned = false;
  bool rth = false;
  Route route; // indices into the mission graph
  double estimate_wh = 0.0;
  double reserve_wh = 0.0;
};

namespace detail
{
inline MissionGraph subgraph(const MissionGraph &graph, const std::vector<std::size_t> &keep, Vec3 start)
{
  std::vector<SensorNode> nodes;
  nodes.reserve(keep.size());
  for (auto v : keep)
    nodes.push_back(graph.node(v));
  return MissionGraph(std::move(nodes), start, graph.end());
}
} // namespace detail

/// Runs the serial or island CBHA depending on the worker count.
[[nodiscard]] inline Route optimise_route(const Route &initial, const PlanningProblem &problem,
                                          const PlannerConfig &config, std::size_t workers)
{
  if (workers <= 1)
    return evolve(initial, problem, config, config.rng_seed).route;
  return evolve_parallel(initial, problem, config, WorkerPlan::make(config, workers)).route;
}

/// Mission check at a charging stop. Keeps the plan while its forecast
/// estimate plus the return-to-home reserve fits the energy on board at every
/// remaining stop; otherwise re-plans over the unvisited nodes from here.
[[nodiscard]] inline CheckResult check_and_replan(const PdvState &state, const Route &remaining,
                                                  const MissionGraph &graph, const PdvParams &pdv,
                                                  const WindField &forecast, const ReplanConfig &config)
{
  const EnergyBudget budget = config.budget_for(state.remaining_wh);
  CheckResult out;

  // remaining route from the current position
  std::vector<std::size_t> keep = remaining.visits;
  std::vector<std::size_t> order(keep.size());
  for (std::size_t i = 0; i < keep.size(); ++i)
    order[i] = i;
  {
    const MissionGraph here = detail::subgraph(graph, keep, state.position);
    const Route r{order};
    const EnergyReport rep = mission_energy(r, here, pdv, forecast, {true, state.time, true});
    out.estimate_wh = rep.discharged();
    out.reserve_wh = max_stop_reserve(r, here, pdv, forecast, rep, budget, state.time);
    if (out.estimate_wh + out.reserve_wh <= state.remaining_wh + config.tolerance_wh)
    {
      out.route = remaining;
      return out;
    }
  }

  out.replanned = true;
  std::vector<char> done(graph.size(), 0);
  for (auto v : state.visited)
    done[v] = 1;
  std::vector<std::size_t> unvisited;
  for (std::size_t v = 0; v < graph.size(); ++v)
    if (!done[v])
      unvisited.push_back(v);

  auto go_home = [&] {
    out.rth = true;
    out.route = Route{};
    const MissionGraph home({}, state.position, graph.end());
    const EnergyReport rep = mission_energy(Route{}, home, pdv, forecast, {true, state.time, true});
    out.estimate_wh = rep.discharged();
    out.reserve_wh = rth_reserve(state.position, graph.end(), pdv, forecast, state.time, budget);
    return out;
  };
  if (unvisited.empty())
    return go_home();

  const MissionGraph sub = detail::subgraph(graph, unvisited, state.position);
  PlannerConfig pc = config.planner;
  InitialSolveOptions opts;
  opts.budget = budget;
  opts.estimate_field = &forecast;
  opts.t0 = state.time;

  Route local;
  try
  {
    if (total_rechargeable(sub) <= 0.0)
      return go_home();
    local = solve_initial(sub, pdv, pc, RouteMode::op, opts).route;
    const PlanningProblem problem(sub, pdv, forecast, config.weights, state.remaining_wh, budget, pc.prize_lower,
                                  pc.prize_budget, state.time);
    local = optimise_route(local, problem, pc, config.workers);
    if (problem.evaluate(local).excess_wh > config.tolerance_wh)
      return go_home();
  }
  catch (const InfeasibleMissionError &)
  {
    return go_home();
  }

  const EnergyReport rep = mission_energy(local, sub, pdv, forecast, {true, state.time, true});
  out.estimate_wh = rep.discharged();
  out.reserve_wh = max_stop_reserve(local, sub, pdv, forecast, rep, budget, state.time);
  out.route.visits.clear();
  for (auto v : local.visits)
    out.route.visits.push_back(unvisited[v]);
  return out;
}

/// Flies a plan under the true wind, charging nodes, applying energy events
/// and checking the plan after every charge.
[[nodiscard]] inline MissionLog execute_mission(const Route &plan, const MissionGraph &graph, const PdvParams &pdv,
                                                const WindField &truth, const WindField &forecast,
                                                std::vector<EnergyEvent> events, const ReplanConfig &config,
                                                std::optional<double> initial_wh = std::nullopt)
{
  if (!validate_route(plan, graph).empty())
    throw InvalidRouteError("execute_mission: invalid plan");

  MissionLog log;
  PdvState state{graph.start(), initial_wh.value_or(pdv.battery_energy), 0.0, {}};
  log.initial_wh = state.remaining_wh;
  std::vector<char> fired(events.size(), 0);
  int charges = 0;

  auto record = [&](MissionEventKind kind, int node_id, double used) {
    MissionEvent e;
    e.kind = kind;
    e.time = state.time;
    e.position = state.position;
    e.node_id = node_id;
    e.energy_used_wh = used;
    e.remaining_wh = state.remaining_wh;
    log.events.push_back(std::move(e));
    return log.events.size() - 1;
  };
  auto spend = [&](double wh) {
    if (wh > state.remaining_wh)
    {
      const double used = state.remaining_wh;
      state.remaining_wh = 0.0;
      return std::pair{false, used};
    }
    state.remaining_wh -= wh;
    return std::pair{true, wh};
  };
  auto fail = [&](double used, int node_id) {
    record(MissionEventKind::failure, node_id, used);
    log.failed = true;
    log.final_wh = state.remaining_wh;
    log.visited = state.visited;
    return log;
  };
  auto fly = [&](std::size_t target) -> bool {
    const Vec3 there = graph.position(target);
    const SegmentEnergy seg = segment_energy(state.position, there, pdv, truth, state.time);
    const auto [ok, used] = spend(seg.wh);
    log.report.e_motor += used;
    log.report.per_leg.push_back({StopKind::flight, target, used, 0.0, seg.seconds});
    log.report.total_time += seg.seconds;
    state.time += seg.seconds;
    if (!ok)
      return false;
    state.position = there;
    record(MissionEventKind::leg, target < graph.size() ? graph.node(target).id : -1, used);
    return true;
  };

  Route route = plan;
  std::size_t idx = 0;
  while (idx < route.size())
  {
    const std::size_t v = route.visits[idx];
    const int id = graph.node(v).id;
    if (!fly(v))
      return fail(log.report.per_leg.back().motor_wh, id);

    const SensorNode &n = graph.node(v);
    const double ipt_wh = ipt_energy(n, pdv.ipt_efficiency) / joules_per_wh;
    const double charge_s = ipt_energy(n, pdv.ipt_efficiency) / pdv.ipt_power;
    const double hover_wh = hover_power(pdv, truth.wind_at(state.position, state.time).velocity) * charge_s /
                            joules_per_wh;
    const auto [ok, used] = spend(ipt_wh + hover_wh);
    if (!ok)
      return fail(used, id);
    log.report.e_motor += hover_wh;
    log.report.e_ipt += ipt_wh;
    log.report.e_recharged += recharged_energy(n);
    log.report.per_leg.push_back({StopKind::charge, v, hover_wh, ipt_wh, charge_s});
    log.report.total_time += charge_s;
    state.time += charge_s;
    state.visited.push_back(v);
    ++charges;
    record(MissionEventKind::charge, id, used);

    for (std::size_t e = 0; e < events.size(); ++e)
    {
      if (fired[e])
        continue;
      const auto &ev = events[e];
      const bool due = ev.trigger == EnergyEvent::Trigger::after_charges ? charges == ev.after_charges
                                                                         : state.time >= ev.at_time;
      if (!due)
        continue;
      fired[e] = 1;
      const double before = state.remaining_wh;
      state.remaining_wh = std::min(state.remaining_wh, std::max(ev.new_remaining_wh, 0.0));
      record(MissionEventKind::energy_event, -1, before - state.remaining_wh);
    }

    const Route rest{std::vector<std::size_t>(route.visits.begin() + static_cast<std::ptrdiff_t>(idx) + 1,
                                              route.visits.end())};
    const CheckResult chk = check_and_replan(state, rest, graph, pdv, forecast, config);
    const auto kind = chk.rth ? MissionEventKind::rth
                              : (chk.replanned ? MissionEventKind::replan : MissionEventKind::check);
    const std::size_t at = record(kind, -1, 0.0);
    log.events[at].estimate_wh = chk.estimate_wh;
    log.events[at].reserve_wh = chk.reserve_wh;
    for (auto u : chk.route.visits)
      log.events[at].plan.push_back(graph.node(u).id);
    if (chk.replanned)
    {
      ++log.replans;
      log.returned_early |= chk.rth;
      route = chk.route;
      idx = 0;
    }
    else
      ++idx;
  }

  if (!fly(graph.end_index()))
    return fail(log.report.per_leg.back().motor_wh, -1);
  record(MissionEventKind::arrived, -1, 0.0);
  log.completed = true;
  log.final_wh = state.remaining_wh;
  log.visited = state.visited;
  return log;
}

struct NetworkPlanOptions
{
  FitnessWeights weights;
  std::size_t workers = 1;
  const WindField *forecast = nullptr; // still air when null
  const WindField *truth = nullptr;    // forecast when null
  ReplanConfig replan;
};

struct NetworkMission
{
  Route plan;            // indices into that mission's graph
  std::vector<int> plan_ids;
  EnergyReport forecast; // offline estimate of the plan
  MissionLog log;
  std::vector<int> recharged_ids;
  double rechargeable_j = 0.0; // over that mission's graph
};

struct NetworkResult
{
  std::vector<NetworkMission> missions;
  [[nodiscard]] std::size_t iterations() const noexcept { return missions.size(); }
};

class StagnationError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Repeats plan -> fly -> mark recharged until no node with prize >= l is left.
[[nodiscard]] inline NetworkResult plan_full_network(const Scenario &scenario, const PdvParams &pdv,
                                                     const PlannerConfig &config, const NetworkPlanOptions &options = {})
{
  if (scenario.nodes.empty())
    throw std::invalid_argument("plan_full_network: empty scenario");
  const WindField still = WindField::still();
  const WindField &forecast = options.forecast ? *options.forecast : still;
  const WindField &truth = options.truth ? *options.truth : forecast;
  const PrizeRange range{1, config.prize_upper};

  std::vector<SensorNode> nodes = sensor_nodes(scenario, range);
  NetworkResult result;
  for (std::size_t iteration = 0;; ++iteration)
  {
    std::vector<SensorNode> eligible;
    for (const auto &n : nodes)
      if (n.prize >= config.prize_lower)
        eligible.push_back(n);
    if (eligible.empty())
      break;

    const MissionGraph graph(eligible, scenario.start, scenario.end);
    const EnergyBudget budget{config.e_de_cap_fraction * pdv.battery_energy, pdv.battery_energy,
                              options.replan.reserve_factor, options.replan.reserve_floor_wh};
    InitialSolveOptions init_opts;
    init_opts.budget = budget;

    NetworkMission m;
    try
    {
      m.plan = solve_initial(graph, pdv, config, RouteMode::op, init_opts).route;
    }
    catch (const InfeasibleMissionError &e)
    {
      throw StagnationError(std::string("plan_full_network: mission ") + std::to_string(iteration + 1) +
                            " cannot reach any remaining node: " + e.what());
    }
    PlannerConfig pc = config;
    pc.rng_seed = config.rng_seed + iteration;
    const PlanningProblem problem(graph, pdv, forecast, options.weights, pdv.battery_energy, budget,
                                  config.prize_lower, config.prize_budget);
    m.plan = optimise_route(m.plan, problem, pc, options.workers);
    m.forecast = mission_energy(m.plan, graph, pdv, forecast);
    m.rechargeable_j = total_rechargeable(graph);
    for (auto v : m.plan.visits)
      m.plan_ids.push_back(graph.node(v).id);

    ReplanConfig rc = options.replan;
    rc.weights = options.weights;
    m.log = execute_mission(m.plan, graph, pdv, truth, forecast, {}, rc);
    for (auto v : m.log.visited)
      m.recharged_ids.push_back(graph.node(v).id);
    if (m.recharged_ids.empty())
      throw StagnationError("plan_full_network: mission " + std::to_string(iteration + 1) + " recharged no node");

    for (auto &n : nodes)
      if (std::find(m.recharged_ids.begin(), m.recharged_ids.end(), n.id) != m.recharged_ids.end())
      {
        n.v_now = n.v_max;
        n.prize = compute_prize(n.v_now, n.v_max, range);
      }
    result.missions.push_back(std::move(m));
  }
  return result;
}

} // namespace romp

#endif
