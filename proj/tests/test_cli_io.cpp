#include <romp/bench.hpp>
#include <romp/io.hpp>
#include <romp/pipeline.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

using namespace romp;

TEST(Attrs, PaperRatios)
{
  const Attrs a = compute_attrs(540.71, 71.879, 1000.0, 99.9, 1.0);
  EXPECT_NEAR(a.r_rd, 2.0917, 0.005 * 2.0917);
  EXPECT_NEAR(a.r_rd, 540.71 / (3600.0 * 71.879) * 1000.0, 1e-12);
  EXPECT_NEAR(a.r_de, 71.95, 0.005);
}

TEST(Attrs, TrivialCases)
{
  const Attrs all = compute_attrs(250.0, 10.0, 250.0, 99.9, 0.0);
  EXPECT_DOUBLE_EQ(all.r_re, 100.0);
  const Attrs none = compute_attrs(0.0, 10.0, 250.0, 99.9, 0.0);
  EXPECT_EQ(none.r_re, 0.0);
  EXPECT_EQ(none.r_rd, 0.0);
  EXPECT_THROW((void)compute_attrs(1.0, 1.0, 0.0, 99.9, 0.0), std::domain_error);
  EXPECT_THROW((void)compute_attrs(1.0, 1.0, 10.0, 0.0, 0.0), std::domain_error);
}

TEST(Attrs, ConsistentWithReport)
{
  const Scenario sc = generate_scenario(40, 2500, 2500, 0.5, 2);
  PlanRequest req;
  req.planner.population = 20;
  req.planner.generations = 10;
  const PlanOutcome p = plan_mission(sc, WindField::still(), req);
  const Attrs a = compute_attrs(p.report, p.graph, 99.9, 0.0);
  const double all = total_rechargeable(p.graph);
  auto rel = [](double x, double y) { return std::abs(x - y) / std::abs(y); };
  EXPECT_LT(rel(a.r_re, p.report.e_recharged / all * 100.0), 1e-9);
  EXPECT_LT(rel(a.r_de, (p.report.e_motor + p.report.e_ipt) / 99.9 * 100.0), 1e-9);
  EXPECT_LT(rel(a.r_rd, p.report.e_recharged / (3600.0 * p.report.discharged()) * 1000.0), 1e-9);
}

TEST(Scenario, DeterministicAndInArea)
{
  const Scenario a = generate_scenario(40, 2500, 2500, 0.5, 9);
  const Scenario b = generate_scenario(40, 2500, 2500, 0.5, 9);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, generate_scenario(40, 2500, 2500, 0.5, 10));
  for (const auto &n : a.nodes)
  {
    EXPECT_GE(n.position.x, 0.0);
    EXPECT_LE(n.position.x, 2500.0);
    EXPECT_GE(n.position.y, 0.0);
    EXPECT_LE(n.position.y, 2500.0);
    EXPECT_GE(n.v_now, 0.0);
    EXPECT_LE(n.v_now, capacitor_for(n.kind).v_max);
  }
  const Scenario op2 = generate_scenario(20, 4000, 4000, 0.5, 1);
  EXPECT_EQ(op2.nodes.size(), 20u);
  EXPECT_THROW((void)generate_scenario(0, 10, 10, 0.5, 1), std::invalid_argument);
}

TEST(Scenario, CapacitorTable)
{
  EXPECT_EQ(capacitor_for(SensorKind::temperature).capacitance, 6.0);
  EXPECT_EQ(capacitor_for(SensorKind::temperature).v_max, 2.5);
  EXPECT_EQ(capacitor_for(SensorKind::pressure).capacitance, 3.0);
  EXPECT_EQ(capacitor_for(SensorKind::pressure).v_max, 5.0);
}

TEST(WindGen, Models)
{
  const WindSpec still_spec{};
  const WindField still = generate_wind({0, 0, 0}, {5, 5, 3}, 25.0, 10.0, 3, still_spec);
  EXPECT_EQ(still.wind_at({30, 40, 10}, 15).velocity, (Vec3{}));

  const Vec3 west = *compass_wind("west", 5.0);
  EXPECT_EQ(west, (Vec3{-5, 0, 0}));
  const WindField c = generate_wind({0, 0, 0}, {5, 5, 3}, 25.0, 10.0, 2, {WindModel::constant, west, 0.0, 0});
  EXPECT_EQ(c.wind_at({60, 70, 20}, 12).velocity, west);

  const Vec3 ne = *compass_wind("north-east", 3.606);
  EXPECT_NEAR(ne.x, 2.55, 0.005);
  EXPECT_NEAR(ne.y, 2.55, 0.005);
  EXPECT_EQ(ne.z, 0.0);
  EXPECT_FALSE(compass_wind("up", 1.0).has_value());

  const WindSpec gust{WindModel::gusty, west, 3.0, 5};
  const WindField g1 = generate_wind({0, 0, 0}, {6, 6, 3}, 25.0, 10.0, 4, gust);
  const WindField g2 = generate_wind({0, 0, 0}, {6, 6, 3}, 25.0, 10.0, 4, gust);
  EXPECT_EQ(g1, g2);
  EXPECT_NE(g1.wind_at({10, 10, 5}, 0).velocity, g1.wind_at({110, 90, 5}, 30).velocity);
}

TEST(Io, ScenarioRoundTrip)
{
  const Scenario s = generate_scenario(25, 3000, 2000, 0.3, 4);
  const Scenario back = scenario_from_json(json::parse(scenario_to_json(s).dump()));
  EXPECT_EQ(back, s);

  const auto path = std::filesystem::temp_directory_path() / "romp_scenario_rt.json";
  save_scenario(s, path.string());
  EXPECT_EQ(load_scenario(path.string()), s);
  std::filesystem::remove(path);
}

TEST(Io, ScenarioErrorsNameTheField)
{
  json j = scenario_to_json(generate_scenario(3, 100, 100, 0.5, 1));
  j["nodes"][1]["kind"] = "humidity";
  try
  {
    (void)scenario_from_json(j, "s.json");
    FAIL() << "expected ParseError";
  }
  catch (const ParseError &e)
  {
    EXPECT_EQ(e.field(), "kind");
    EXPECT_NE(std::string(e.what()).find("nodes[1]"), std::string::npos);
  }
  json missing = scenario_to_json(generate_scenario(3, 100, 100, 0.5, 1));
  missing.erase("start");
  EXPECT_THROW((void)scenario_from_json(missing), ParseError);
}

TEST(Io, MalformedJsonReportsLine)
{
  const auto path = std::filesystem::temp_directory_path() / "romp_bad.json";
  detail::write_file(path.string(), "{\n  \"area\": [1, 2],\n  \"nodes\": [,]\n}\n");
  try
  {
    (void)load_scenario(path.string());
    FAIL() << "expected ParseError";
  }
  catch (const ParseError &e)
  {
    EXPECT_EQ(e.line(), 3u);
  }
  std::filesystem::remove(path);
}

TEST(Io, WindRoundTripIsExact)
{
  const WindSpec gust{WindModel::gusty, {1.3, -0.7, 0}, 3.0, 8};
  const WindField f = generate_wind({-10, 5, 0}, {4, 3, 2}, 25.0, 10.0, 3, gust);
  std::stringstream ss;
  write_wind(ss, f);
  const WindField back = read_wind(ss);
  EXPECT_EQ(back, f);
}

TEST(Io, WindFormatLayout)
{
  std::vector<Vec3> frame(8);
  for (std::size_t i = 0; i < 8; ++i)
    frame[i] = {static_cast<double>(i), 0, 0};
  const WindField f({0, 0, 0}, 25.0, {2, 2, 2}, 10.0, {frame});
  std::stringstream ss;
  write_wind(ss, f);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(ss, line))
    lines.push_back(line);
  ASSERT_EQ(lines.size(), 7u + 8u);
  EXPECT_EQ(lines[0], "ROMP-WIND 1");
  EXPECT_EQ(lines[1], "origin 0 0 0");
  EXPECT_EQ(lines[2], "cube_size 25");
  EXPECT_EQ(lines[3], "dims 2 2 2");
  EXPECT_EQ(lines[4], "time_step 10");
  EXPECT_EQ(lines[5], "frames 1");
  EXPECT_EQ(lines[6], "frame 0");
  EXPECT_EQ(lines[7], "0 0 0");
  EXPECT_EQ(lines[8], "1 0 0");
  EXPECT_EQ(lines[14], "7 0 0");
}

TEST(Io, WindParseErrorsCarryLineAndField)
{
  auto expect = [](const std::string &text, std::size_t line, const std::string &field) {
    std::stringstream ss(text);
    try
    {
      (void)read_wind(ss, "w");
      ADD_FAILURE() << "expected ParseError for:\n" << text;
    }
    catch (const ParseError &e)
    {
      EXPECT_EQ(e.line(), line) << e.what();
      EXPECT_EQ(e.field(), field) << e.what();
    }
  };
  const std::string head = "ROMP-WIND 1\norigin 0 0 0\ncube_size 25\ndims 2 2 2\ntime_step 10\nframes 1\n";
  expect("WIND 2\n", 1, "header");
  expect("ROMP-WIND 1\norigin 0 0\n", 2, "origin");
  expect("ROMP-WIND 1\norigin 0 0 0\ncube 25\n", 3, "cube_size");
  expect(head + "frame 0\n0 0 0\n1 x 0\n", 9, "vector");
  expect(head + "frame 1\n", 7, "frame");
  expect(head + "frame 0\n0 0 0\n", 8, "vector");
}

TEST(Io, ConfigOverridesAndValidation)
{
  const json j = json::parse(R"({"planner": {"population": 12, "w_re": 80}, "pdv": {"mass": 2.5}})");
  const RunConfig c = config_from_json(j);
  EXPECT_EQ(c.planner.population, 12);
  EXPECT_EQ(c.planner.w_re, 80.0);
  EXPECT_EQ(c.planner.generations, 80);
  EXPECT_EQ(c.pdv.mass, 2.5);
  EXPECT_THROW((void)config_from_json(json::parse(R"({"planner": {"attraction_probability": 2}})")), ParseError);
  EXPECT_THROW((void)config_from_json(json::parse(R"({"planner": {"population": "many"}})")), ParseError);

  const RunConfig rt = config_from_json(config_to_json(c));
  EXPECT_EQ(rt.planner.population, 12);
  EXPECT_EQ(rt.pdv.mass, 2.5);
}

TEST(Io, EventsRoundTrip)
{
  const json j = json::parse(R"([{"after_charges": 5, "remaining_wh": 50}, {"at_time": 900.5, "remaining_wh": 22}])");
  const auto ev = events_from_json(j);
  ASSERT_EQ(ev.size(), 2u);
  EXPECT_EQ(ev[0].trigger, EnergyEvent::Trigger::after_charges);
  EXPECT_EQ(ev[0].after_charges, 5);
  EXPECT_EQ(ev[1].trigger, EnergyEvent::Trigger::at_time);
  EXPECT_EQ(ev[1].at_time, 900.5);
  EXPECT_EQ(events_to_json(ev), j);
  EXPECT_THROW((void)events_from_json(json::parse(R"([{"remaining_wh": 3}])")), ParseError);
}

TEST(Io, MissionLogIsLineDelimitedJson)
{
  const Scenario sc = generate_scenario(30, 2500, 2500, 0.5, 3);
  PlannerConfig cfg;
  const MissionGraph g = mission_graph(sc, cfg);
  const Route plan = solve_initial(g, PdvParams{}, cfg, RouteMode::op).route;
  const auto log = execute_mission(plan, g, PdvParams{}, WindField::still(), WindField::still(), {}, ReplanConfig{});
  std::stringstream ss;
  write_mission_log(ss, log);
  std::string line;
  std::size_t n = 0;
  while (std::getline(ss, line))
  {
    const json j = json::parse(line);
    EXPECT_TRUE(j.contains("event"));
    ++n;
  }
  EXPECT_EQ(n, log.events.size() + 1);
}

TEST(Bench, ReproducibleAndSummarized)
{
  BenchOptions opt;
  opt.runs = 2;
  opt.planner.population = 10;
  opt.planner.generations = 5;
  const auto a = to_csv(strategy_sweep(opt));
  auto b = to_csv(strategy_sweep(opt));
  // wall-clock column differs between runs
  const std::size_t tcol = a.column("t");
  for (auto &r : b.rows)
    r[tcol] = "";
  auto a2 = a;
  for (auto &r : a2.rows)
    r[tcol] = "";
  EXPECT_EQ(a2.rows, b.rows);

  std::stringstream ss;
  write_csv(ss, a);
  const CsvTable back = read_csv(ss);
  EXPECT_EQ(back.header, a.header);
  EXPECT_EQ(back.rows, a.rows);

  const CsvTable s = summarize(a, default_keys(a));
  ASSERT_EQ(s.rows.size(), 3u);
  EXPECT_EQ(s.header[0], "strategy");
  EXPECT_EQ(s.rows[0][1], "2");
  const std::size_t col = s.column("mean_r_re");
  double mean = 0.0;
  for (const auto &r : a.rows)
    if (r[1] == s.rows[0][0])
      mean += std::stod(r[a.column("r_re")]) / 2.0;
  EXPECT_NEAR(std::stod(s.rows[0][col]), mean, 1e-6 * std::max(1.0, std::abs(mean)));
}

TEST(Pipeline, PlanFitsCapUnderForecast)
{
  for (std::uint64_t seed : {3, 8})
  {
    const Scenario sc = generate_scenario(40, 2500, 2500, 0.5, seed);
    const WindField wind = generate_wind_for(sc, PdvParams{}, 50.0, 10.0, 120,
                                             {WindModel::gusty, *compass_wind("west", 6.0), 2.0, seed});
    PlanRequest req;
    req.planner.population = 20;
    req.planner.generations = 20;
    req.weights = weights_for(Strategy::charge_more);
    const PlanOutcome p = plan_mission(sc, wind, req);
    EXPECT_FALSE(p.route.empty());
    EXPECT_LE(p.report.discharged(), req.planner.e_de_cap_fraction * req.pdv.battery_energy);
  }
}
