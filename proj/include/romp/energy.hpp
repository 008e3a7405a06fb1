#ifndef ROMP_ENERGY_HPP
#define ROMP_ENERGY_HPP

#include <romp/model.hpp>
#include <romp/wind.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace romp
{

inline constexpr double joules_per_wh = 3600.0;

/// Quadrotor PDV constants. Defaults describe a DJI M100 with a TB47D pack.
struct PdvParams
{
  double mass = 3.107;              // kg, body + payload
  double area_horizontal_flow = 0.15; // m^2, windward area for horizontal airflow
  double area_vertical_flow = 0.78;   // m^2, windward area for vertical airflow
  double rotor_reference_area = 0.15; // m^2, induced-power reference area
  double drag_coefficient = 1.0;
  double air_density = 1.225; // kg/m^3
  double g = 9.81;
  double v_ascent = 5.0;   // m/s
  double v_descent = 4.0;  // m/s
  double v_cruise = 17.0;  // m/s
  double cruise_altitude = 30.0; // m
  double battery_energy = 99.9;  // Wh
  double ipt_power = 150.0;      // W
  double ipt_efficiency = 0.5;
  double sim_time_step = 10.0; // s

  [[nodiscard]] double weight() const noexcept { return mass * g; }

  void validate() const
  {
    const double all[] = {mass,       area_horizontal_flow, area_vertical_flow, rotor_reference_area,
                          drag_coefficient, air_density, g, v_ascent, v_descent, v_cruise,
                          cruise_altitude, battery_energy, ipt_power, ipt_efficiency, sim_time_step};
    for (double v : all)
      if (!(v > 0.0))
        throw std::invalid_argument("PdvParams: all parameters must be strictly positive");
    if (ipt_efficiency > 1.0)
      throw std::invalid_argument("PdvParams: ipt_efficiency must lie in (0, 1]");
  }
};

/// PDV-side energy spent charging a node to v_max, in joules.
[[nodiscard]] inline double ipt_energy(const SensorNode &node, double ipt_efficiency)
{
  const double dv = node.v_max - node.v_now;
  return node.capacitance / (2.0 * ipt_efficiency) * dv * dv;
}

/// Energy delivered into the node's capacitor, in joules.
[[nodiscard]] inline double recharged_energy(const SensorNode &node)
{
  const double dv = node.v_max - node.v_now;
  return node.capacitance / 2.0 * dv * dv;
}

[[nodiscard]] inline double drag_force(double airspeed, double area, double drag_coefficient, double air_density)
{
  return 0.5 * air_density * drag_coefficient * area * airspeed * airspeed;
}

enum class FlightMode
{
  vertical,
  horizontal
};

[[nodiscard]] inline double thrust(FlightMode mode, double drag, double weight)
{
  if (mode == FlightMode::vertical)
    return drag + weight;
  return std::hypot(drag, weight);
}

/// Mechanical rotor power for a given thrust, in watts.
[[nodiscard]] inline double motor_power(double thrust_n, double air_density, double rotor_area)
{
  return std::sqrt(thrust_n * thrust_n * thrust_n / (2.0 * air_density * rotor_area));
}

/// Power to hold position in a (possibly windy) airmass.
[[nodiscard]] inline double hover_power(const PdvParams &pdv, Vec3 wind)
{
  const double drag = drag_force(wind.norm(), pdv.area_horizontal_flow, pdv.drag_coefficient, pdv.air_density);
  return motor_power(thrust(FlightMode::horizontal, drag, pdv.weight()), pdv.air_density, pdv.rotor_reference_area);
}

struct SegmentEnergy
{
  double wh = 0.0;
  double seconds = 0.0;
  bool wind_out_of_bounds = false;
};

namespace detail
{
/// Straight constant-ground-speed motion, simulated in fixed steps. Wind is
/// sampled at the start of each step; the last step uses the exact remainder.
inline void fly_straight(Vec3 from, Vec3 to, double speed, FlightMode mode, const PdvParams &pdv,
                         const WindField &field, double t0, SegmentEnergy &acc)
{
  const double length = distance(from, to);
  if (length == 0.0)
    return;
  const double duration = length / speed;
  const Vec3 velocity = (speed / length) * (to - from);
  const double area = mode == FlightMode::vertical ? pdv.area_vertical_flow : pdv.area_horizontal_flow;

  const auto full_steps = static_cast<std::size_t>(std::floor(duration / pdv.sim_time_step));
  const double remainder = duration - static_cast<double>(full_steps) * pdv.sim_time_step;
  const std::size_t steps = full_steps + (remainder > 0.0 ? 1 : 0);

  Vec3 p = from;
  for (std::size_t s = 0; s < steps; ++s)
  {
    const double step = s < full_steps ? pdv.sim_time_step : remainder;
    const WindSample w = field.wind_at(p, t0 + acc.seconds);
    acc.wind_out_of_bounds |= w.out_of_bounds;
    const double airspeed = (velocity - w.velocity).norm();
    const double drag = drag_force(airspeed, area, pdv.drag_coefficient, pdv.air_density);
    const double power = motor_power(thrust(mode, drag, pdv.weight()), pdv.air_density, pdv.rotor_reference_area);
    acc.wh += power * step / joules_per_wh;
    acc.seconds += step;
    p = p + step * velocity;
  }
}
} // namespace detail

/// Motor energy and time for one leg: climb to cruise altitude, cruise, and
/// descend onto the target. Legs with no horizontal displacement move
/// vertically only.
[[nodiscard]] inline SegmentEnergy segment_energy(Vec3 from, Vec3 to, const PdvParams &pdv, const WindField &field,
                                                  double t0 = 0.0)
{
  if (!(pdv.v_ascent > 0.0) || !(pdv.v_descent > 0.0) || !(pdv.v_cruise > 0.0))
    throw std::invalid_argument("segment_energy: flight speeds must be positive");

  SegmentEnergy acc;
  auto vertical = [&](Vec3 a, Vec3 b) {
    const double speed = b.z >= a.z ? pdv.v_ascent : pdv.v_descent;
    detail::fly_straight(a, b, speed, FlightMode::vertical, pdv, field, t0, acc);
  };

  if (ground_distance(from, to) == 0.0)
  {
    vertical(from, to);
    return acc;
  }
  const Vec3 top_from{from.x, from.y, pdv.cruise_altitude};
  const Vec3 top_to{to.x, to.y, pdv.cruise_altitude};
  vertical(from, top_from);
  detail::fly_straight(top_from, top_to, pdv.v_cruise, FlightMode::horizontal, pdv, field, t0, acc);
  vertical(top_to, to);
  return acc;
}

enum class StopKind
{
  flight,
  charge
};

struct LegEnergy
{
  StopKind kind = StopKind::flight;
  std::size_t target = 0; // graph vertex (node index, or end_index() for the final leg)
  double motor_wh = 0.0;
  double ipt_wh = 0.0;
  double seconds = 0.0;
};

struct EnergyReport
{
  double e_motor = 0.0;     // Wh, rotor energy including hover while charging
  double e_ipt = 0.0;       // Wh, PDV-side transfer energy
  double e_recharged = 0.0; // J, delivered into the nodes
  double total_time = 0.0;  // s
  bool wind_out_of_bounds = false;
  std::vector<LegEnergy> per_leg;

  [[nodiscard]] double discharged() const noexcept { return e_motor + e_ipt; }
};

struct MissionEnergyOptions
{
  bool include_hover_during_ipt = true;
  double t0 = 0.0;
  bool keep_legs = true;
};

/// Flies start -> visits -> end, charging every visited node. Totals are the
/// running sums of the per-leg entries.
[[nodiscard]] inline EnergyReport mission_energy(const Route &route, const MissionGraph &graph, const PdvParams &pdv,
                                                 const WindField &field, MissionEnergyOptions opts = {})
{
  detail::check_membership(route, graph);
  EnergyReport rep;
  if (opts.keep_legs)
    rep.per_leg.reserve(2 * route.size() + 1);
  double t = opts.t0;
  auto push = [&](const LegEnergy &leg) {
    rep.e_motor += leg.motor_wh;
    rep.e_ipt += leg.ipt_wh;
    rep.total_time += leg.seconds;
    t += leg.seconds;
    if (opts.keep_legs)
      rep.per_leg.push_back(leg);
  };

  Vec3 here = graph.start();
  auto fly = [&](std::size_t target) {
    const Vec3 there = graph.position(target);
    const SegmentEnergy seg = segment_energy(here, there, pdv, field, t);
    rep.wind_out_of_bounds |= seg.wind_out_of_bounds;
    push({StopKind::flight, target, seg.wh, 0.0, seg.seconds});
    here = there;
  };

  for (auto v : route.visits)
  {
    fly(v);
    const SensorNode &n = graph.node(v);
    const double e_ipt_j = ipt_energy(n, pdv.ipt_efficiency);
    const double charge_s = e_ipt_j / pdv.ipt_power;
    double hover_wh = 0.0;
    if (opts.include_hover_during_ipt && charge_s > 0.0)
    {
      const WindSample w = field.wind_at(here, t);
      rep.wind_out_of_bounds |= w.out_of_bounds;
      hover_wh = hover_power(pdv, w.velocity) * charge_s / joules_per_wh;
    }
    rep.e_recharged += recharged_energy(n);
    push({StopKind::charge, v, hover_wh, e_ipt_j / joules_per_wh, charge_s});
  }
  fly(graph.end_index());
  return rep;
}

/// Limits a plan must respect. The cap bounds total discharged energy. When
/// on_board is positive, every stop of the plan (its start and each charging
/// stop) must also keep estimate-to-go plus a return-to-home reserve within
/// the energy left on board at that stop.
struct EnergyBudget
{
  double cap_wh = 0.0;
  double on_board_wh = 0.0;
  double reserve_factor = 1.2;
  double reserve_floor_wh = 5.0;

  [[nodiscard]] bool checks_reserve() const noexcept { return on_board_wh > 0.0; }
};

/// Energy held back for a direct flight from `from` to the mission end.
[[nodiscard]] inline double rth_reserve(Vec3 from, Vec3 end, const PdvParams &pdv, const WindField &field, double t,
                                        const EnergyBudget &budget)
{
  const double direct = segment_energy(from, end, pdv, field, t).wh;
  return std::max(direct * budget.reserve_factor, budget.reserve_floor_wh);
}

/// Largest reserve over the plan's stops.
[[nodiscard]] inline double max_stop_reserve(const Route &route, const MissionGraph &graph, const PdvParams &pdv,
                                             const WindField &field, const EnergyReport &report,
                                             const EnergyBudget &budget, double t0 = 0.0)
{
  double worst = rth_reserve(graph.start(), graph.end(), pdv, field, t0, budget);
  double t = t0;
  std::size_t visit = 0;
  for (const auto &leg : report.per_leg)
  {
    t += leg.seconds;
    if (leg.kind == StopKind::charge)
      worst = std::max(worst, rth_reserve(graph.position(route.visits[visit++]), graph.end(), pdv, field, t, budget));
  }
  return worst;
}

/// How far (Wh) a plan overshoots its budget; zero or negative means feasible.
/// The report must have been produced with keep_legs when the reserve is checked.
[[nodiscard]] inline double budget_excess(const Route &route, const MissionGraph &graph, const PdvParams &pdv,
                                          const WindField &field, const EnergyReport &report,
                                          const EnergyBudget &budget, double t0 = 0.0)
{
  double excess = report.discharged() - budget.cap_wh;
  if (budget.checks_reserve())
    excess = std::max(excess, report.discharged() + max_stop_reserve(route, graph, pdv, field, report, budget, t0) -
                                  budget.on_board_wh);
  return excess;
}

} // namespace romp

#endif
