#ifndef ROMP_BENCH_HPP
#define ROMP_BENCH_HPP

#include <romp/pipeline.hpp>

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace romp
{

/// Column-named table of string cells, written and read as plain CSV.
struct CsvTable
{
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  [[nodiscard]] std::size_t column(const std::string &name) const
  {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name)
        return i;
    throw std::out_of_range("CsvTable: no column '" + name + "'");
  }
};

namespace detail
{
inline std::string cell(double v)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}
inline std::string cell(std::uint64_t v) { return std::to_string(v); }
inline std::string cell(std::size_t v, int) { return std::to_string(v); }
inline std::string cell(const std::string &s) { return s; }
} // namespace detail

inline void write_csv(std::ostream &out, const CsvTable &t)
{
  auto line = [&](const std::vector<std::string> &cells) {
    for (std::size_t i = 0; i < cells.size(); ++i)
      out << (i ? "," : "") << cells[i];
    out << "\n";
  };
  line(t.header);
  for (const auto &r : t.rows)
    line(r);
}

[[nodiscard]] inline CsvTable read_csv(std::istream &in, const std::string &source = "csv")
{
  CsvTable t;
  std::string line;
  std::size_t lineno = 0;
  auto split = [](const std::string &s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string c;
    while (std::getline(ss, c, ','))
      out.push_back(c);
    if (!s.empty() && s.back() == ',')
      out.emplace_back();
    return out;
  };
  while (std::getline(in, line))
  {
    ++lineno;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.empty())
      continue;
    auto cells = split(line);
    if (t.header.empty())
      t.header = std::move(cells);
    else if (cells.size() != t.header.size())
      throw std::runtime_error(source + ":" + std::to_string(lineno) + ": expected " +
                               std::to_string(t.header.size()) + " cells, found " + std::to_string(cells.size()));
    else
      t.rows.push_back(std::move(cells));
  }
  if (t.header.empty())
    throw std::runtime_error(source + ": empty csv");
  return t;
}

struct BenchOptions
{
  std::uint64_t master_seed = 1;
  std::size_t runs = 50;
  std::size_t workers = 1;
  PlannerConfig planner;
  PdvParams pdv;
};

// ---------------------------------------------------------------- strategy

struct StrategyRun
{
  std::uint64_t seed = 0;
  Strategy strategy = Strategy::balance;
  double initial_fitness = 0.0;
  double fitness = 0.0;
  std::size_t visited = 0;
  Attrs attrs;
};

/// 20 nodes in 4000 x 4000 m, still air, each strategy planned from the same
/// initial route.
[[nodiscard]] inline std::vector<StrategyRun> strategy_sweep(const BenchOptions &opt)
{
  std::vector<StrategyRun> out;
  const WindField still = WindField::still();
  for (std::size_t i = 0; i < opt.runs; ++i)
  {
    const std::uint64_t seed = opt.master_seed + i;
    const Scenario sc = generate_scenario(20, 4000.0, 4000.0, 0.5, seed);
    for (Strategy s : {Strategy::save_energy, Strategy::balance, Strategy::charge_more})
    {
      PlanRequest req{opt.planner, opt.pdv, weights_for(s), RouteMode::op, opt.workers};
      req.planner.rng_seed = seed;
      req.planner.w_re = req.weights.w_re;
      req.planner.w_de = req.weights.w_de;
      const PlanOutcome p = plan_mission(sc, still, req);
      out.push_back({seed, s, p.initial_fitness, p.fitness, p.route.size(), p.attrs});
    }
  }
  return out;
}

[[nodiscard]] inline CsvTable to_csv(const std::vector<StrategyRun> &runs)
{
  CsvTable t{{"seed", "strategy", "visited", "initial_fitness", "fitness", "t", "e_re_star", "e_de_star", "r_re",
              "r_de", "r_rd"},
             {}};
  for (const auto &r : runs)
    t.rows.push_back({detail::cell(r.seed), std::string(to_string(r.strategy)), detail::cell(r.visited, 0),
                      detail::cell(r.initial_fitness), detail::cell(r.fitness), detail::cell(r.attrs.t),
                      detail::cell(r.attrs.e_re_star), detail::cell(r.attrs.e_de_star), detail::cell(r.attrs.r_re),
                      detail::cell(r.attrs.r_de), detail::cell(r.attrs.r_rd)});
  return t;
}

// ----------------------------------------------------------------- scaling

struct ScalingRun
{
  std::uint64_t seed = 0;
  int population = 0;
  double initial_fitness = 0.0;
  double fitness = 0.0;
  double seconds = 0.0;
  [[nodiscard]] bool improved() const noexcept { return fitness > initial_fitness; }
};

/// OP-1 style scenarios (40 nodes, 2500 x 2500 m); the CBHA is run at each
/// population size from the same initial route with a fixed generation count.
[[nodiscard]] inline std::vector<ScalingRun> scaling_sweep(const BenchOptions &opt, const std::vector<int> &populations,
                                                           int generations)
{
  std::vector<ScalingRun> out;
  const WindField still = WindField::still();
  for (std::size_t i = 0; i < opt.runs; ++i)
  {
    const std::uint64_t seed = opt.master_seed + i;
    const Scenario sc = generate_scenario(40, 2500.0, 2500.0, 0.5, seed);
    const MissionGraph graph = mission_graph(sc, opt.planner);
    const Route initial = solve_initial(graph, opt.pdv, opt.planner, RouteMode::op).route;
    const PlanningProblem problem(graph, opt.pdv, still, {opt.planner.w_re, opt.planner.w_de}, opt.planner);
    for (int pop : populations)
    {
      PlannerConfig pc = opt.planner;
      pc.population = pop;
      pc.generations = generations;
      pc.rng_seed = seed;
      const auto t0 = std::chrono::steady_clock::now();
      const ParallelResult r = evolve_parallel(initial, problem, pc, WorkerPlan::make(pc, opt.workers));
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      out.push_back({seed, pop, r.initial_fitness, r.fitness, secs});
    }
  }
  return out;
}

[[nodiscard]] inline CsvTable to_csv(const std::vector<ScalingRun> &runs)
{
  CsvTable t{{"seed", "population", "initial_fitness", "fitness", "improved", "seconds"}, {}};
  for (const auto &r : runs)
    t.rows.push_back({detail::cell(r.seed), std::to_string(r.population), detail::cell(r.initial_fitness),
                      detail::cell(r.fitness), r.improved() ? "1" : "0", detail::cell(r.seconds)});
  return t;
}

// ---------------------------------------------------------------- parallel

struct ParallelRun
{
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  double fitness = 0.0;
  double seconds = 0.0;
};

/// Fixed total population split over each worker count.
[[nodiscard]] inline std::vector<ParallelRun> parallel_sweep(const BenchOptions &opt,
                                                             const std::vector<std::size_t> &worker_counts)
{
  std::vector<ParallelRun> out;
  const WindField still = WindField::still();
  for (std::size_t i = 0; i < opt.runs; ++i)
  {
    const std::uint64_t seed = opt.master_seed + i;
    const Scenario sc = generate_scenario(40, 2500.0, 2500.0, 0.5, seed);
    const MissionGraph graph = mission_graph(sc, opt.planner);
    const Route initial = solve_initial(graph, opt.pdv, opt.planner, RouteMode::op).route;
    const PlanningProblem problem(graph, opt.pdv, still, {opt.planner.w_re, opt.planner.w_de}, opt.planner);
    PlannerConfig pc = opt.planner;
    pc.rng_seed = seed;
    for (std::size_t w : worker_counts)
    {
      const auto t0 = std::chrono::steady_clock::now();
      const ParallelResult r = evolve_parallel(initial, problem, pc, WorkerPlan::make(pc, w));
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      out.push_back({seed, w, r.fitness, secs});
    }
  }
  return out;
}

[[nodiscard]] inline CsvTable to_csv(const std::vector<ParallelRun> &runs)
{
  CsvTable t{{"seed", "workers", "fitness", "seconds"}, {}};
  for (const auto &r : runs)
    t.rows.push_back(
        {detail::cell(r.seed), detail::cell(r.workers, 0), detail::cell(r.fitness), detail::cell(r.seconds)});
  return t;
}

// -------------------------------------------------------------------- wind

struct WindRun
{
  std::uint64_t seed = 0;
  std::string wind;
  double e_de_wh = 0.0;
  double r_re = 0.0;
  std::size_t visited = 0;
};

/// Same OP-1 style scenario planned under still, westerly 5 m/s, and gusty air.
[[nodiscard]] inline std::vector<WindRun> wind_sweep(const BenchOptions &opt)
{
  std::vector<WindRun> out;
  for (std::size_t i = 0; i < opt.runs; ++i)
  {
    const std::uint64_t seed = opt.master_seed + i;
    const Scenario sc = generate_scenario(40, 2500.0, 2500.0, 0.5, seed);
    const std::vector<std::pair<std::string, WindSpec>> specs{
        {"still", {WindModel::still, {}, 0.0, seed}},
        {"west", {WindModel::constant, *compass_wind("west", 5.0), 0.0, seed}},
        {"gusty", {WindModel::gusty, *compass_wind("west", 5.0), 3.0, seed}}};
    for (const auto &[name, spec] : specs)
    {
      const WindField field = generate_wind_for(sc, opt.pdv, 25.0, 10.0, 360, spec);
      PlanRequest req{opt.planner, opt.pdv, {opt.planner.w_re, opt.planner.w_de}, RouteMode::op, opt.workers};
      req.planner.rng_seed = seed;
      const PlanOutcome p = plan_mission(sc, field, req);
      out.push_back({seed, name, p.attrs.e_de_star, p.attrs.r_re, p.route.size()});
    }
  }
  return out;
}

[[nodiscard]] inline CsvTable to_csv(const std::vector<WindRun> &runs)
{
  CsvTable t{{"seed", "wind", "visited", "e_de_star", "r_re"}, {}};
  for (const auto &r : runs)
    t.rows.push_back(
        {detail::cell(r.seed), r.wind, detail::cell(r.visited, 0), detail::cell(r.e_de_wh), detail::cell(r.r_re)});
  return t;
}

// ------------------------------------------------------------------ report

/// Groups rows by the key columns and averages every other numeric column.
/// Output keeps first-seen group order and adds a count column.
[[nodiscard]] inline CsvTable summarize(const CsvTable &in, const std::vector<std::string> &keys)
{
  std::vector<std::size_t> key_cols;
  for (const auto &k : keys)
    key_cols.push_back(in.column(k));
  std::vector<std::size_t> value_cols;
  for (std::size_t c = 0; c < in.header.size(); ++c)
  {
    if (std::find(key_cols.begin(), key_cols.end(), c) != key_cols.end() || in.header[c] == "seed")
      continue;
    bool numeric = !in.rows.empty();
    for (const auto &r : in.rows)
    {
      std::istringstream ss(r[c]);
      double v;
      if (!(ss >> v))
      {
        numeric = false;
        break;
      }
    }
    if (numeric)
      value_cols.push_back(c);
  }

  std::vector<std::vector<std::string>> order;
  std::map<std::vector<std::string>, std::pair<std::size_t, std::vector<double>>> acc;
  for (const auto &r : in.rows)
  {
    std::vector<std::string> key;
    for (auto c : key_cols)
      key.push_back(r[c]);
    auto [it, fresh] = acc.try_emplace(key, 0, std::vector<double>(value_cols.size(), 0.0));
    if (fresh)
      order.push_back(key);
    ++it->second.first;
    for (std::size_t i = 0; i < value_cols.size(); ++i)
      it->second.second[i] += std::stod(r[value_cols[i]]);
  }

  CsvTable out;
  out.header = keys;
  out.header.push_back("count");
  for (auto c : value_cols)
    out.header.push_back("mean_" + in.header[c]);
  for (const auto &key : order)
  {
    const auto &[n, sums] = acc.at(key);
    std::vector<std::string> row = key;
    row.push_back(std::to_string(n));
    for (double s : sums)
      row.push_back(detail::cell(s / static_cast<double>(n)));
    out.rows.push_back(std::move(row));
  }
  return out;
}

/// Default grouping for each suite's CSV, chosen from its header.
[[nodiscard]] inline std::vector<std::string> default_keys(const CsvTable &t)
{
  for (const char *k : {"strategy", "population", "workers", "wind"})
    if (std::find(t.header.begin(), t.header.end(), k) != t.header.end())
      return {k};
  throw std::runtime_error("report: unrecognised csv; pass the grouping columns explicitly");
}

} // namespace romp

#endif
