#include <romp/bench.hpp>
#include <romp/io.hpp>
#include <romp/pipeline.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace
{

constexpr int exit_infeasible = 2;
constexpr int exit_parse = 3;

struct Common
{
  std::string scenario;
  std::string wind;
  std::string config;
  std::optional<std::uint64_t> seed;
  std::size_t workers = 1;
  std::string strategy = "balance";
  std::string mode = "op";
  std::string events;
  std::string out;
};

romp::RunConfig load_run_config(const Common &c)
{
  romp::RunConfig rc = c.config.empty() ? romp::RunConfig{} : romp::load_config(c.config);
  if (c.seed)
    rc.planner.rng_seed = *c.seed;
  return rc;
}

romp::FitnessWeights strategy_weights(const std::string &name)
{
  const auto s = romp::parse_strategy(name);
  if (!s)
    throw romp::ParseError("--strategy", 0, "", "expected charge-more, balance or save-energy");
  return romp::weights_for(*s);
}

romp::WindField wind_or_still(const std::string &path)
{
  return path.empty() ? romp::WindField::still() : romp::load_wind(path);
}

void emit(const std::string &path, const std::string &text)
{
  if (path.empty() || path == "-")
    std::cout << text;
  else
    romp::detail::write_file(path, text);
}

std::vector<int> ids_of(const romp::Route &r, const romp::MissionGraph &g)
{
  std::vector<int> ids;
  for (auto v : r.visits)
    ids.push_back(g.node(v).id);
  return ids;
}

int run_plan(const Common &c)
{
  const romp::RunConfig rc = load_run_config(c);
  const romp::Scenario sc = romp::load_scenario(c.scenario);
  const romp::WindField forecast = wind_or_still(c.wind);
  romp::PlanRequest req{rc.planner, rc.pdv, strategy_weights(c.strategy),
                        c.mode == "tsp" ? romp::RouteMode::tsp : romp::RouteMode::op, c.workers};
  req.planner.w_re = req.weights.w_re;
  req.planner.w_de = req.weights.w_de;
  const romp::PlanOutcome p = romp::plan_mission(sc, forecast, req);

  const auto problems = romp::validate_route(p.route, p.graph, req.mode);
  if (!problems.empty())
  {
    std::cerr << "plan: route violates constraints\n";
    return 1;
  }
  romp::RouteFile rf;
  rf.mode = c.mode;
  rf.visit_order = ids_of(p.route, p.graph);
  rf.initial_order = ids_of(p.initial, p.graph);
  rf.start = sc.start;
  rf.end = sc.end;
  rf.fitness = p.fitness;
  rf.initial_fitness = p.initial_fitness;
  rf.attrs = romp::attrs_to_json(p.attrs);
  rf.energy_report = romp::report_to_json(p.report, p.graph);
  emit(c.out, romp::route_file_to_json(rf).dump(2) + "\n");
  std::cerr << "plan: " << p.route.size() << " of " << p.graph.size() << " nodes, fitness " << p.fitness
            << " (initial " << p.initial_fitness << "), E_de " << p.report.discharged() << " Wh\n";
  return 0;
}

int run_simulate(const Common &c, const std::string &route_path, const std::string &forecast_path)
{
  const romp::RunConfig rc = load_run_config(c);
  const romp::Scenario sc = romp::load_scenario(c.scenario);
  const romp::RouteFile rf = romp::load_route(route_path);
  const romp::WindField truth = wind_or_still(c.wind);
  const romp::WindField forecast = forecast_path.empty() ? truth : romp::load_wind(forecast_path);
  const std::vector<romp::EnergyEvent> events = c.events.empty() ? std::vector<romp::EnergyEvent>{}
                                                                  : romp::load_events(c.events);

  const romp::MissionGraph graph = romp::mission_graph(sc, rc.planner);
  romp::Route plan;
  try
  {
    plan = romp::route_from_ids(rf.visit_order, graph);
  }
  catch (const std::exception &e)
  {
    throw romp::ParseError(route_path, 0, "visit_order", e.what());
  }
  romp::ReplanConfig cfg;
  cfg.planner.rng_seed = rc.planner.rng_seed;
  cfg.planner.prize_lower = rc.planner.prize_lower;
  cfg.planner.prize_upper = rc.planner.prize_upper;
  cfg.planner.prize_budget = rc.planner.prize_budget;
  cfg.weights = strategy_weights(c.strategy);
  cfg.workers = c.workers;
  const romp::MissionLog log = romp::execute_mission(plan, graph, rc.pdv, truth, forecast, events, cfg);

  std::ostringstream ss;
  romp::write_mission_log(ss, log);
  emit(c.out, ss.str());
  std::cerr << "simulate: " << log.visited.size() << " charged, " << log.replans << " replans, "
            << (log.failed ? "energy exhausted" : "arrived") << ", " << log.final_wh << " Wh left\n";
  return log.failed ? 1 : 0;
}

} // namespace

int main(int argc, char **argv)
{
  CLI::App app{"romp: recharging-mission planner for wireless rechargeable sensor networks"};
  app.require_subcommand(1);
  Common c;

  auto add_common = [&](CLI::App *sub, bool needs_scenario) {
    auto *opt = sub->add_option("--scenario", c.scenario, "scenario JSON");
    if (needs_scenario)
      opt->required();
    sub->add_option("--wind", c.wind, "wind-field file (still air when omitted)");
    sub->add_option("--config", c.config, "planner/PDV config JSON");
    sub->add_option("--seed", c.seed, "master RNG seed");
    sub->add_option("--workers", c.workers, "CBHA worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--strategy", c.strategy, "charge-more | balance | save-energy")
        ->check(CLI::IsMember({"charge-more", "balance", "save-energy"}));
    sub->add_option("--out", c.out, "output file (stdout when omitted)");
  };

  auto *plan = app.add_subcommand("plan", "plan one mission and write a route file");
  add_common(plan, true);
  plan->add_option("--mode", c.mode, "tsp | op")->check(CLI::IsMember({"tsp", "op"}));

  auto *sim = app.add_subcommand("simulate", "fly a route under the truth wind and write the mission log");
  add_common(sim, true);
  std::string route_path, forecast_path;
  sim->add_option("--route", route_path, "route JSON from plan")->required();
  sim->add_option("--forecast", forecast_path, "forecast wind for checks (defaults to --wind)");
  sim->add_option("--events", c.events, "energy event script JSON");

  auto *gen = app.add_subcommand("generate", "write scenario and wind fixtures");
  std::size_t nodes = 40;
  double width = 2500.0, height = 2500.0, pressure = 0.5;
  std::string wind_out, wind_model = "still", heading = "west";
  double wind_speed = 5.0, gust = 3.0, cube = 25.0, time_step = 10.0;
  std::size_t frames = 360;
  std::uint64_t gen_seed = 1;
  gen->add_option("--nodes", nodes, "sensor count")->check(CLI::PositiveNumber);
  gen->add_option("--width", width, "area width, m");
  gen->add_option("--height", height, "area height, m");
  gen->add_option("--pressure-fraction", pressure, "share of pressure sensors")->check(CLI::Range(0.0, 1.0));
  gen->add_option("--seed", gen_seed, "scenario and gust seed");
  gen->add_option("--out", c.out, "scenario output (stdout when omitted)");
  gen->add_option("--wind-out", wind_out, "also write a wind field here");
  gen->add_option("--wind-model", wind_model, "still | constant | gusty")
      ->check(CLI::IsMember({"still", "constant", "gusty"}));
  gen->add_option("--heading", heading, "compass direction the air moves toward");
  gen->add_option("--speed", wind_speed, "wind speed, m/s");
  gen->add_option("--gust", gust, "gust amplitude, m/s");
  gen->add_option("--cube", cube, "wind grid spacing, m");
  gen->add_option("--time-step", time_step, "wind frame period, s");
  gen->add_option("--frames", frames, "wind frame count");

  auto *bench = app.add_subcommand("bench", "run an experiment suite and write CSV");
  std::string suite;
  std::size_t runs = 10;
  std::uint64_t bench_seed = 1;
  bench->add_option("suite", suite, "strategy | scaling | parallel | wind")
      ->required()
      ->check(CLI::IsMember({"strategy", "scaling", "parallel", "wind"}));
  bench->add_option("--runs", runs, "seeded runs");
  bench->add_option("--seed", bench_seed, "master seed");
  bench->add_option("--workers", c.workers, "CBHA worker threads")->check(CLI::PositiveNumber);
  bench->add_option("--config", c.config, "planner/PDV config JSON");
  bench->add_option("--out", c.out, "CSV output (stdout when omitted)");

  auto *report = app.add_subcommand("report", "average a bench CSV by group");
  std::string csv_in;
  std::vector<std::string> keys;
  report->add_option("--in", csv_in, "bench CSV")->required();
  report->add_option("--by", keys, "grouping columns (default per suite)");
  report->add_option("--out", c.out, "CSV output (stdout when omitted)");

  CLI11_PARSE(app, argc, argv);

  try
  {
    if (plan->parsed())
      return run_plan(c);
    if (sim->parsed())
      return run_simulate(c, route_path, forecast_path);
    if (gen->parsed())
    {
      const romp::Scenario sc = romp::generate_scenario(nodes, width, height, pressure, gen_seed);
      emit(c.out, romp::scenario_to_json(sc).dump(2) + "\n");
      if (!wind_out.empty())
      {
        romp::WindSpec spec;
        spec.seed = gen_seed;
        spec.gust_amplitude = gust;
        spec.model = wind_model == "still"      ? romp::WindModel::still
                     : wind_model == "constant" ? romp::WindModel::constant
                                                : romp::WindModel::gusty;
        if (spec.model != romp::WindModel::still)
        {
          const auto v = romp::compass_wind(heading, wind_speed);
          if (!v)
            throw romp::ParseError("--heading", 0, "", "expected a compass direction such as west or north-east");
          spec.mean = *v;
        }
        romp::save_wind(romp::generate_wind_for(sc, romp::PdvParams{}, cube, time_step, frames, spec), wind_out);
      }
      return 0;
    }
    if (bench->parsed())
    {
      const romp::RunConfig rc = load_run_config(c);
      romp::BenchOptions opt{bench_seed, runs, c.workers, rc.planner, rc.pdv};
      romp::CsvTable t;
      if (suite == "strategy")
        t = romp::to_csv(romp::strategy_sweep(opt));
      else if (suite == "scaling")
        t = romp::to_csv(romp::scaling_sweep(opt, {50, 200, 800}, 100));
      else if (suite == "parallel")
        t = romp::to_csv(romp::parallel_sweep(opt, {1, 2, 4}));
      else
        t = romp::to_csv(romp::wind_sweep(opt));
      std::ostringstream ss;
      romp::write_csv(ss, t);
      emit(c.out, ss.str());
      return 0;
    }
    if (report->parsed())
    {
      std::ifstream in(csv_in);
      if (!in)
        throw romp::ParseError(csv_in, 0, "", "cannot open file");
      romp::CsvTable t;
      try
      {
        t = romp::read_csv(in, csv_in);
      }
      catch (const std::runtime_error &e)
      {
        throw romp::ParseError(csv_in, 0, "", e.what());
      }
      const auto summary = romp::summarize(t, keys.empty() ? romp::default_keys(t) : keys);
      std::ostringstream ss;
      romp::write_csv(ss, summary);
      emit(c.out, ss.str());
      return 0;
    }
  }
  catch (const romp::ParseError &e)
  {
    std::cerr << "parse error: " << e.what() << "\n";
    return exit_parse;
  }
  catch (const romp::InfeasibleMissionError &e)
  {
    std::cerr << "infeasible: " << e.what() << "\n";
    return exit_infeasible;
  }
  catch (const std::exception &e)
  {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
