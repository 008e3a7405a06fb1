#ifndef ROMP_IO_HPP
#define ROMP_IO_HPP

#include <romp/attrs.hpp>
#include <romp/energy.hpp>
#include <romp/mission.hpp>
#include <romp/model.hpp>
#include <romp/scenario.hpp>
#include <romp/wind.hpp>

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace romp
{

using json = nlohmann::json;

/// Malformed input. line is 1-based, 0 when unknown.
class ParseError : public std::runtime_error
{
public:
  ParseError(std::string source, std::size_t line, std::string field, const std::string &what)
      : std::runtime_error(format(source, line, field, what)), source_(std::move(source)), line_(line),
        field_(std::move(field))
  {
  }

  [[nodiscard]] const std::string &source() const noexcept { return source_; }
  [[nodiscard]] std::size_t line() const noexcept { return line_; }
  [[nodiscard]] const std::string &field() const noexcept { return field_; }

private:
  static std::string format(const std::string &source, std::size_t line, const std::string &field,
                            const std::string &what)
  {
    std::string s = source;
    if (line > 0)
      s += ":" + std::to_string(line);
    if (!field.empty())
      s += ": field '" + field + "'";
    return s + ": " + what;
  }

  std::string source_;
  std::size_t line_;
  std::string field_;
};

namespace detail
{
inline std::string read_file(const std::string &path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ParseError(path, 0, "", "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string &path, const std::string &text)
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error(path + ": cannot open for writing");
  out << text;
}

inline std::size_t line_of_offset(const std::string &text, std::size_t offset)
{
  std::size_t line = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i)
    if (text[i] == '\n')
      ++line;
  return line;
}

inline json parse_json(const std::string &text, const std::string &source)
{
  try
  {
    return json::parse(text);
  }
  catch (const json::parse_error &e)
  {
    throw ParseError(source, line_of_offset(text, e.byte > 0 ? e.byte - 1 : 0), "", e.what());
  }
}

template <typename T>
T get_field(const json &j, const char *key, const std::string &source)
{
  if (!j.is_object() || !j.contains(key))
    throw ParseError(source, 0, key, "missing");
  try
  {
    return j.at(key).get<T>();
  }
  catch (const json::exception &e)
  {
    throw ParseError(source, 0, key, e.what());
  }
}

template <typename T>
void maybe_field(const json &j, const char *key, T &out, const std::string &source)
{
  if (j.is_object() && j.contains(key))
    out = get_field<T>(j, key, source);
}

inline json to_json(Vec3 v) { return json::array({v.x, v.y, v.z}); }

inline Vec3 vec_from(const json &j, const char *key, const std::string &source)
{
  const auto a = get_field<std::vector<double>>(j, key, source);
  if (a.size() != 3)
    throw ParseError(source, 0, key, "expected [x, y, z]");
  return {a[0], a[1], a[2]};
}
} // namespace detail

// ---------------------------------------------------------------- scenario

[[nodiscard]] inline json scenario_to_json(const Scenario &s)
{
  json nodes = json::array();
  for (const auto &n : s.nodes)
    nodes.push_back({{"id", n.id},
                     {"position", detail::to_json(n.position)},
                     {"kind", std::string(to_string(n.kind))},
                     {"v_now", n.v_now}});
  return {{"area", {s.width, s.height}},
          {"start", detail::to_json(s.start)},
          {"end", detail::to_json(s.end)},
          {"seed", s.seed},
          {"nodes", nodes}};
}

[[nodiscard]] inline Scenario scenario_from_json(const json &j, const std::string &source = "scenario")
{
  Scenario s;
  const auto area = detail::get_field<std::vector<double>>(j, "area", source);
  if (area.size() != 2)
    throw ParseError(source, 0, "area", "expected [width, height]");
  s.width = area[0];
  s.height = area[1];
  s.start = detail::vec_from(j, "start", source);
  s.end = detail::vec_from(j, "end", source);
  detail::maybe_field(j, "seed", s.seed, source);
  const json nodes = detail::get_field<json>(j, "nodes", source);
  if (!nodes.is_array())
    throw ParseError(source, 0, "nodes", "expected an array");
  for (std::size_t i = 0; i < nodes.size(); ++i)
  {
    const std::string where = source + " nodes[" + std::to_string(i) + "]";
    ScenarioNode n;
    n.id = detail::get_field<int>(nodes[i], "id", where);
    n.position = detail::vec_from(nodes[i], "position", where);
    const auto kind = parse_sensor_kind(detail::get_field<std::string>(nodes[i], "kind", where));
    if (!kind)
      throw ParseError(where, 0, "kind", "expected 'temperature' or 'pressure'");
    n.kind = *kind;
    n.v_now = detail::get_field<double>(nodes[i], "v_now", where);
    if (n.v_now < 0.0 || n.v_now > capacitor_for(n.kind).v_max)
      throw ParseError(where, 0, "v_now", "outside [0, v_max] for the sensor kind");
    s.nodes.push_back(n);
  }
  return s;
}

inline void save_scenario(const Scenario &s, const std::string &path)
{
  detail::write_file(path, scenario_to_json(s).dump(2) + "\n");
}

[[nodiscard]] inline Scenario load_scenario(const std::string &path)
{
  return scenario_from_json(detail::parse_json(detail::read_file(path), path), path);
}

// ------------------------------------------------------------------ config

/// Planner and PDV settings. Every key is optional; missing keys keep defaults.
struct RunConfig
{
  PlannerConfig planner;
  PdvParams pdv;
};

[[nodiscard]] inline json config_to_json(const RunConfig &c)
{
  const auto &p = c.planner;
  const auto &d = c.pdv;
  return {{"planner",
           {{"prize_lower", p.prize_lower},
            {"prize_upper", p.prize_upper},
            {"prize_budget", p.prize_budget},
            {"w_re", p.w_re},
            {"w_de", p.w_de},
            {"population", p.population},
            {"generations", p.generations},
            {"search_number", p.search_number},
            {"attraction_probability", p.attraction_probability},
            {"aggregate_frequency", p.aggregate_frequency},
            {"init_swaps", p.init_swaps},
            {"e_de_cap_fraction", p.e_de_cap_fraction},
            {"rng_seed", p.rng_seed},
            {"gls_lambda_factor", p.gls_lambda_factor},
            {"gls_iterations_per_node", p.gls_iterations_per_node},
            {"prize_step_small", p.prize_step_small},
            {"prize_step_large", p.prize_step_large},
            {"prize_step_large_gap_wh", p.prize_step_large_gap_wh}}},
          {"pdv",
           {{"mass", d.mass},
            {"area_horizontal_flow", d.area_horizontal_flow},
            {"area_vertical_flow", d.area_vertical_flow},
            {"rotor_reference_area", d.rotor_reference_area},
            {"drag_coefficient", d.drag_coefficient},
            {"air_density", d.air_density},
            {"g", d.g},
            {"v_ascent", d.v_ascent},
            {"v_descent", d.v_descent},
            {"v_cruise", d.v_cruise},
            {"cruise_altitude", d.cruise_altitude},
            {"battery_energy", d.battery_energy},
            {"ipt_power", d.ipt_power},
            {"ipt_efficiency", d.ipt_efficiency},
            {"sim_time_step", d.sim_time_step}}}};
}

[[nodiscard]] inline RunConfig config_from_json(const json &j, const std::string &source = "config")
{
  RunConfig c;
  if (j.contains("planner"))
  {
    const json &p = j["planner"];
    auto &o = c.planner;
    const std::string s = source + " planner";
    detail::maybe_field(p, "prize_lower", o.prize_lower, s);
    detail::maybe_field(p, "prize_upper", o.prize_upper, s);
    detail::maybe_field(p, "prize_budget", o.prize_budget, s);
    detail::maybe_field(p, "w_re", o.w_re, s);
    detail::maybe_field(p, "w_de", o.w_de, s);
    detail::maybe_field(p, "population", o.population, s);
    detail::maybe_field(p, "generations", o.generations, s);
    detail::maybe_field(p, "search_number", o.search_number, s);
    detail::maybe_field(p, "attraction_probability", o.attraction_probability, s);
    detail::maybe_field(p, "aggregate_frequency", o.aggregate_frequency, s);
    detail::maybe_field(p, "init_swaps", o.init_swaps, s);
    detail::maybe_field(p, "e_de_cap_fraction", o.e_de_cap_fraction, s);
    detail::maybe_field(p, "rng_seed", o.rng_seed, s);
    detail::maybe_field(p, "gls_lambda_factor", o.gls_lambda_factor, s);
    detail::maybe_field(p, "gls_iterations_per_node", o.gls_iterations_per_node, s);
    detail::maybe_field(p, "prize_step_small", o.prize_step_small, s);
    detail::maybe_field(p, "prize_step_large", o.prize_step_large, s);
    detail::maybe_field(p, "prize_step_large_gap_wh", o.prize_step_large_gap_wh, s);
  }
  if (j.contains("pdv"))
  {
    const json &p = j["pdv"];
    auto &o = c.pdv;
    const std::string s = source + " pdv";
    detail::maybe_field(p, "mass", o.mass, s);
    detail::maybe_field(p, "area_horizontal_flow", o.area_horizontal_flow, s);
    detail::maybe_field(p, "area_vertical_flow", o.area_vertical_flow, s);
    detail::maybe_field(p, "rotor_reference_area", o.rotor_reference_area, s);
    detail::maybe_field(p, "drag_coefficient", o.drag_coefficient, s);
    detail::maybe_field(p, "air_density", o.air_density, s);
    detail::maybe_field(p, "g", o.g, s);
    detail::maybe_field(p, "v_ascent", o.v_ascent, s);
    detail::maybe_field(p, "v_descent", o.v_descent, s);
    detail::maybe_field(p, "v_cruise", o.v_cruise, s);
    detail::maybe_field(p, "cruise_altitude", o.cruise_altitude, s);
    detail::maybe_field(p, "battery_energy", o.battery_energy, s);
    detail::maybe_field(p, "ipt_power", o.ipt_power, s);
    detail::maybe_field(p, "ipt_efficiency", o.ipt_efficiency, s);
    detail::maybe_field(p, "sim_time_step", o.sim_time_step, s);
  }
  try
  {
    c.planner.validate();
    c.pdv.validate();
  }
  catch (const std::invalid_argument &e)
  {
    throw ParseError(source, 0, "", e.what());
  }
  return c;
}

[[nodiscard]] inline RunConfig load_config(const std::string &path)
{
  return config_from_json(detail::parse_json(detail::read_file(path), path), path);
}

// ------------------------------------------------------------------ events

[[nodiscard]] inline std::vector<EnergyEvent> events_from_json(const json &j, const std::string &source = "events")
{
  if (!j.is_array())
    throw ParseError(source, 0, "", "expected an array of events");
  std::vector<EnergyEvent> out;
  for (std::size_t i = 0; i < j.size(); ++i)
  {
    const std::string where = source + " [" + std::to_string(i) + "]";
    EnergyEvent e;
    e.new_remaining_wh = detail::get_field<double>(j[i], "remaining_wh", where);
    if (j[i].contains("after_charges"))
    {
      e.trigger = EnergyEvent::Trigger::after_charges;
      e.after_charges = detail::get_field<int>(j[i], "after_charges", where);
    }
    else if (j[i].contains("at_time"))
    {
      e.trigger = EnergyEvent::Trigger::at_time;
      e.at_time = detail::get_field<double>(j[i], "at_time", where);
    }
    else
      throw ParseError(where, 0, "after_charges", "event needs 'after_charges' or 'at_time'");
    out.push_back(e);
  }
  return out;
}

[[nodiscard]] inline json events_to_json(const std::vector<EnergyEvent> &events)
{
  json out = json::array();
  for (const auto &e : events)
  {
    json j{{"remaining_wh", e.new_remaining_wh}};
    if (e.trigger == EnergyEvent::Trigger::after_charges)
      j["after_charges"] = e.after_charges;
    else
      j["at_time"] = e.at_time;
    out.push_back(j);
  }
  return out;
}

[[nodiscard]] inline std::vector<EnergyEvent> load_events(const std::string &path)
{
  return events_from_json(detail::parse_json(detail::read_file(path), path), path);
}

// -------------------------------------------------------------------- wind
//
// Text format, whitespace separated, one record per line:
//   ROMP-WIND 1
//   origin <x> <y> <z>
//   cube_size <metres>
//   dims <nx> <ny> <nz>            vertex counts
//   time_step <seconds>
//   frames <count>
//   frame <k>                      then nx*ny*nz lines "<vx> <vy> <vz>",
//                                  x fastest, then y, then z

inline void write_wind(std::ostream &out, const WindField &f)
{
  char buf[128];
  auto vec = [&](Vec3 v) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g", v.x, v.y, v.z);
    return std::string(buf);
  };
  const auto d = f.dims();
  out << "ROMP-WIND 1\n";
  out << "origin " << vec(f.origin()) << "\n";
  std::snprintf(buf, sizeof buf, "%.17g", f.cube_size());
  out << "cube_size " << buf << "\n";
  out << "dims " << d.nx << " " << d.ny << " " << d.nz << "\n";
  std::snprintf(buf, sizeof buf, "%.17g", f.time_step());
  out << "time_step " << buf << "\n";
  out << "frames " << f.frames().size() << "\n";
  for (std::size_t k = 0; k < f.frames().size(); ++k)
  {
    out << "frame " << k << "\n";
    for (const auto &v : f.frames()[k])
      out << vec(v) << "\n";
  }
}

[[nodiscard]] inline WindField read_wind(std::istream &in, const std::string &source = "wind")
{
  std::string line;
  std::size_t lineno = 0;
  auto next = [&](const char *what) {
    while (std::getline(in, line))
    {
      ++lineno;
      if (line.find_first_not_of(" \t\r") != std::string::npos)
        return std::istringstream(line);
    }
    throw ParseError(source, lineno, what, "unexpected end of file");
  };
  auto keyed = [&](const char *key) {
    auto ss = next(key);
    std::string k;
    ss >> k;
    if (k != key)
      throw ParseError(source, lineno, key, "expected '" + std::string(key) + "', found '" + k + "'");
    return ss;
  };
  auto expect_ok = [&](std::istringstream &ss, const char *key) {
    if (ss.fail())
      throw ParseError(source, lineno, key, "malformed number");
    std::string rest;
    if (ss >> rest)
      throw ParseError(source, lineno, key, "trailing text '" + rest + "'");
  };

  {
    auto ss = next("header");
    std::string magic;
    int version = 0;
    ss >> magic >> version;
    if (magic != "ROMP-WIND" || version != 1)
      throw ParseError(source, lineno, "header", "expected 'ROMP-WIND 1'");
  }
  Vec3 origin;
  double cube = 0.0, dt = 0.0;
  WindField::Dims dims;
  std::size_t frames = 0;
  {
    auto ss = keyed("origin");
    ss >> origin.x >> origin.y >> origin.z;
    expect_ok(ss, "origin");
  }
  {
    auto ss = keyed("cube_size");
    ss >> cube;
    expect_ok(ss, "cube_size");
  }
  {
    auto ss = keyed("dims");
    ss >> dims.nx >> dims.ny >> dims.nz;
    expect_ok(ss, "dims");
  }
  {
    auto ss = keyed("time_step");
    ss >> dt;
    expect_ok(ss, "time_step");
  }
  {
    auto ss = keyed("frames");
    ss >> frames;
    expect_ok(ss, "frames");
  }
  if (dims.nx < 2 || dims.ny < 2 || dims.nz < 2 || frames == 0 || !(cube > 0.0) || !(dt > 0.0))
    throw ParseError(source, lineno, "dims", "grid needs >= 2 vertices per axis, >= 1 frame, positive sizes");

  const std::size_t nv = dims.nx * dims.ny * dims.nz;
  std::vector<std::vector<Vec3>> data(frames, std::vector<Vec3>(nv));
  for (std::size_t k = 0; k < frames; ++k)
  {
    auto ss = keyed("frame");
    std::size_t idx = 0;
    ss >> idx;
    expect_ok(ss, "frame");
    if (idx != k)
      throw ParseError(source, lineno, "frame", "expected frame " + std::to_string(k));
    for (std::size_t v = 0; v < nv; ++v)
    {
      auto vs = next("vector");
      Vec3 w;
      vs >> w.x >> w.y >> w.z;
      expect_ok(vs, "vector");
      data[k][v] = w;
    }
  }
  return WindField(origin, cube, dims, dt, std::move(data));
}

inline void save_wind(const WindField &f, const std::string &path)
{
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error(path + ": cannot open for writing");
  write_wind(out, f);
}

[[nodiscard]] inline WindField load_wind(const std::string &path)
{
  std::ifstream in(path);
  if (!in)
    throw ParseError(path, 0, "", "cannot open file");
  return read_wind(in, path);
}

// ------------------------------------------------------------------- route

[[nodiscard]] inline json attrs_to_json(const Attrs &a)
{
  return {{"t", a.t}, {"e_re_star", a.e_re_star}, {"e_de_star", a.e_de_star},
          {"r_re", a.r_re}, {"r_de", a.r_de}, {"r_rd", a.r_rd}};
}

[[nodiscard]] inline json report_to_json(const EnergyReport &r, const MissionGraph &graph)
{
  json legs = json::array();
  for (std::size_t i = 0; i < r.per_leg.size(); ++i)
  {
    const auto &l = r.per_leg[i];
    legs.push_back({{"leg", i},
                    {"kind", l.kind == StopKind::flight ? "flight" : "charge"},
                    {"target", l.target < graph.size() ? json(graph.node(l.target).id) : json("end")},
                    {"motor_wh", l.motor_wh},
                    {"ipt_wh", l.ipt_wh},
                    {"seconds", l.seconds}});
  }
  return {{"e_motor_wh", r.e_motor},   {"e_ipt_wh", r.e_ipt},
          {"e_recharged_j", r.e_recharged}, {"total_time_s", r.total_time},
          {"wind_out_of_bounds", r.wind_out_of_bounds}, {"per_leg", legs}};
}

/// Planned route as written by `romp plan`. visit_order holds sensor ids.
struct RouteFile
{
  std::string mode = "op";
  std::vector<int> visit_order;
  Vec3 start;
  Vec3 end;
  double fitness = 0.0;
  double initial_fitness = 0.0;
  std::vector<int> initial_order;
  json attrs = json::object();
  json energy_report = json::object();
};

[[nodiscard]] inline json route_file_to_json(const RouteFile &r)
{
  return {{"mode", r.mode},
          {"visit_order", r.visit_order},
          {"start", detail::to_json(r.start)},
          {"end", detail::to_json(r.end)},
          {"fitness", r.fitness},
          {"initial_fitness", r.initial_fitness},
          {"initial_order", r.initial_order},
          {"attrs", r.attrs},
          {"energy_report", r.energy_report}};
}

[[nodiscard]] inline RouteFile route_file_from_json(const json &j, const std::string &source = "route")
{
  RouteFile r;
  detail::maybe_field(j, "mode", r.mode, source);
  r.visit_order = detail::get_field<std::vector<int>>(j, "visit_order", source);
  r.start = detail::vec_from(j, "start", source);
  r.end = detail::vec_from(j, "end", source);
  detail::maybe_field(j, "fitness", r.fitness, source);
  detail::maybe_field(j, "initial_fitness", r.initial_fitness, source);
  detail::maybe_field(j, "initial_order", r.initial_order, source);
  if (j.contains("attrs"))
    r.attrs = j["attrs"];
  if (j.contains("energy_report"))
    r.energy_report = j["energy_report"];
  return r;
}

[[nodiscard]] inline RouteFile load_route(const std::string &path)
{
  return route_file_from_json(detail::parse_json(detail::read_file(path), path), path);
}

/// Sensor ids to graph indices.
[[nodiscard]] inline Route route_from_ids(const std::vector<int> &ids, const MissionGraph &graph)
{
  Route r;
  for (int id : ids)
    r.visits.push_back(graph.index_of(id));
  return r;
}

// -------------------------------------------------------------- mission log

/// One JSON object per line, in event order.
inline void write_mission_log(std::ostream &out, const MissionLog &log)
{
  for (const auto &e : log.events)
  {
    json j{{"event", to_string(e.kind)},
           {"time_s", e.time},
           {"position", detail::to_json(e.position)},
           {"energy_used_wh", e.energy_used_wh},
           {"remaining_wh", e.remaining_wh}};
    if (e.node_id >= 0)
      j["node"] = e.node_id;
    if (e.kind == MissionEventKind::check || e.kind == MissionEventKind::replan || e.kind == MissionEventKind::rth)
    {
      j["estimate_to_end_wh"] = e.estimate_wh;
      j["reserve_wh"] = e.reserve_wh;
      j["plan"] = e.plan;
    }
    out << j.dump() << "\n";
  }
  json summary{{"event", "summary"},
               {"initial_wh", log.initial_wh},
               {"final_wh", log.final_wh},
               {"replans", log.replans},
               {"completed", log.completed},
               {"failed", log.failed},
               {"returned_early", log.returned_early},
               {"e_motor_wh", log.report.e_motor},
               {"e_ipt_wh", log.report.e_ipt},
               {"e_recharged_j", log.report.e_recharged},
               {"total_time_s", log.report.total_time}};
  out << summary.dump() << "\n";
}

} // namespace romp

#endif
