#include <romp/initial_solver.hpp>
#include <romp/pipeline.hpp>

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace romp;

namespace
{
SensorNode node(int id, double x, double y, int prize = 8, double vnow = 1.0)
{
  SensorNode n;
  n.id = id;
  n.position = {x, y, 0};
  n.capacitance = 3.0;
  n.v_max = 5.0;
  n.v_now = vnow;
  n.prize = prize;
  return n;
}

MissionGraph random_graph(std::size_t n, double side, std::uint64_t seed, std::vector<oracle::Pt> *pts = nullptr)
{
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, side);
  std::vector<SensorNode> nodes;
  for (std::size_t i = 0; i < n; ++i)
  {
    nodes.push_back(node(static_cast<int>(i), u(rng), u(rng)));
    if (pts)
      pts->push_back({nodes.back().position.x, nodes.back().position.y});
  }
  const Vec3 depot{side / 2, side / 2, 0};
  return MissionGraph(nodes, depot, depot);
}
} // namespace

TEST(Gls, OptimalSquareUnchanged)
{
  const MissionGraph g({node(0, 0, 0), node(1, 100, 0), node(2, 100, 100), node(3, 0, 100)}, {0, -50, 0},
                       {0, -50, 0});
  const Route tour{{0, 3, 2, 1}};
  GlsState st(g);
  const Route out = gls_improve(tour, g, st, 200);
  EXPECT_NEAR(route_total_distance(out, g), route_total_distance(tour, g), 1e-9);
}

TEST(Gls, UncrossesEdges)
{
  const MissionGraph g({node(0, 0, 0), node(1, 100, 0), node(2, 100, 100), node(3, 0, 100)}, {-50, 50, 0},
                       {-50, 50, 0});
  const Route crossing{{0, 2, 1, 3}};
  GlsState st(g);
  const Route out = gls_improve(crossing, g, st, 200);
  EXPECT_LT(route_total_distance(out, g), route_total_distance(crossing, g));
}

TEST(Gls, NeverLengthens)
{
  for (std::uint64_t seed = 0; seed < 30; ++seed)
  {
    const MissionGraph g = random_graph(12, 1000, seed);
    Route r{{}};
    for (std::size_t i = 0; i < g.size(); ++i)
      r.visits.push_back(i);
    std::mt19937_64 rng(seed);
    std::shuffle(r.visits.begin(), r.visits.end(), rng);
    GlsState st(g);
    const Route out = gls_improve(r, g, st, 500);
    EXPECT_LE(route_total_distance(out, g), route_total_distance(r, g) + 1e-9);
    EXPECT_TRUE(validate_route(out, g, RouteMode::tsp).empty());
    for (std::size_t a = 0; a < g.size() + 2; ++a)
      for (std::size_t b = 0; b < g.size() + 2; ++b)
        EXPECT_GE(st.penalty(a, b), 0);
  }
}

TEST(SolveInitial, FiveNodeTspMatchesBruteForce)
{
  for (std::uint64_t seed = 100; seed < 120; ++seed)
  {
    std::vector<oracle::Pt> pts;
    const MissionGraph g = random_graph(5, 2000, seed, &pts);
    const auto sol = solve_initial(g, PdvParams{}, PlannerConfig{}, RouteMode::tsp);
    EXPECT_TRUE(validate_route(sol.route, g, RouteMode::tsp).empty());
    EXPECT_NEAR(route_total_distance(sol.route, g), oracle::best_tour({1000, 1000}, pts), 1e-6);
  }
}

TEST(SolveInitial, InfeasibleWhenBatteryTooSmall)
{
  PdvParams pdv;
  pdv.battery_energy = 1.0;
  const MissionGraph g({node(0, 3000, 0)}, {}, {});
  EXPECT_THROW((void)solve_initial(g, pdv, PlannerConfig{}, RouteMode::op), InfeasibleMissionError);
}

TEST(SolveInitial, OpFitsCapAndPrizeBudget)
{
  const PlannerConfig cfg;
  const PdvParams pdv;
  for (std::uint64_t seed = 1; seed <= 10; ++seed)
  {
    const Scenario sc = generate_scenario(40, 2500, 2500, 0.5, seed);
    const MissionGraph g = mission_graph(sc, cfg);
    const auto sol = solve_initial(g, pdv, cfg, RouteMode::op);
    EXPECT_TRUE(validate_route(sol.route, g).empty());
    EXPECT_FALSE(sol.route.empty());
    EXPECT_LE(route_collected_prize(sol.route, g), cfg.prize_budget);
    const auto rep = mission_energy(sol.route, g, pdv, WindField::still());
    EXPECT_LE(rep.discharged(), 0.8 * 99.9);
  }
}

TEST(SolveInitial, Deterministic)
{
  const Scenario sc = generate_scenario(30, 2500, 2500, 0.5, 77);
  const MissionGraph g = mission_graph(sc, PlannerConfig{});
  const auto a = solve_initial(g, PdvParams{}, PlannerConfig{}, RouteMode::op);
  const auto b = solve_initial(g, PdvParams{}, PlannerConfig{}, RouteMode::op);
  EXPECT_EQ(a.route, b.route);
}

TEST(ReduceTarget, Examples)
{
  const PlannerConfig cfg;
  EXPECT_EQ(reduce_target_prize(300, 100.0, cfg, 10), 250);
  EXPECT_EQ(reduce_target_prize(300, 10.0, cfg, 10), 295);
  EXPECT_EQ(reduce_target_prize(10, 50.0, cfg, 10), 10);
  EXPECT_EQ(reduce_target_prize(12, 50.0, cfg, 10), 10);
}

TEST(DropSelection, Examples)
{
  const MissionGraph g({node(0, 100, 0, 10), node(1, 200, 0, 9), node(2, 300, 0, 6)}, {}, {});
  EXPECT_EQ(drop_selection(g, 25, 1000).size(), 3u);
  EXPECT_TRUE(drop_selection(g, 0, 1000).empty());
  auto kept = drop_selection(g, 19, 1000);
  std::sort(kept.begin(), kept.end());
  EXPECT_EQ(kept, (std::vector<std::size_t>{0, 1}));
}

TEST(DropSelection, NeverExceedsPrizeBudget)
{
  for (std::uint64_t seed = 0; seed < 20; ++seed)
  {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> p(6, 10);
    std::uniform_real_distribution<double> u(0, 1000);
    std::vector<SensorNode> nodes;
    for (int i = 0; i < 20; ++i)
      nodes.push_back(node(i, u(rng), u(rng), p(rng)));
    const MissionGraph g(nodes, {}, {});
    for (int budget : {0, 15, 40, 77, 500})
    {
      const auto kept = drop_selection(g, 1000, budget);
      int total = 0;
      for (auto v : kept)
        total += g.node(v).prize;
      EXPECT_LE(total, budget);
    }
  }
}

TEST(DropSelection, TiesPreferCheaperInsertion)
{
  // equal prizes; the node near the depot is the cheaper insertion
  const MissionGraph g({node(0, 900, 0, 8), node(1, 10, 0, 8)}, {}, {});
  const auto kept = drop_selection(g, 8, 100);
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_EQ(kept[0], 1u);
}

TEST(TopUp, AddsHighestPrizeWhileItFits)
{
  const MissionGraph g({node(0, 100, 0, 6), node(1, 200, 0, 9), node(2, 300, 0, 7), node(3, 50, 0, 9)}, {}, {});
  const auto at_most = [](std::size_t n) { return [n](const Route &r) { return r.size() <= n; }; };
  Route r = top_up(Route{{0}}, g, 100, at_most(3));
  ASSERT_EQ(r.size(), 3u);
  EXPECT_EQ(std::count(r.visits.begin(), r.visits.end(), 1u) + std::count(r.visits.begin(), r.visits.end(), 3u), 2);
  EXPECT_EQ(r.visits.front(), 3u);

  r = top_up(Route{{0}}, g, 15, at_most(4));
  EXPECT_EQ(r, Route({{3, 0}}));
  EXPECT_EQ(top_up(Route{{0}}, g, 100, at_most(1)), Route{{0}});
}

TEST(SolveInitial, OpLeavesNoCheapNodeBehind)
{
  const PlannerConfig cfg;
  const PdvParams pdv;
  for (std::uint64_t seed = 1; seed <= 5; ++seed)
  {
    const Scenario sc = generate_scenario(40, 2500, 2500, 0.5, seed);
    const MissionGraph g = mission_graph(sc, cfg);
    const auto sol = solve_initial(g, pdv, cfg, RouteMode::op);
    const EnergyBudget budget{cfg.e_de_cap_fraction * pdv.battery_energy};
    const int collected = route_collected_prize(sol.route, g);
    for (std::size_t v = 0; v < g.size(); ++v)
    {
      if (std::count(sol.route.visits.begin(), sol.route.visits.end(), v) ||
          collected + g.node(v).prize > cfg.prize_budget)
        continue;
      for (std::size_t k = 0; k <= sol.route.size(); ++k)
      {
        Route r = sol.route;
        r.visits.insert(r.visits.begin() + static_cast<std::ptrdiff_t>(k), v);
        const auto rep = mission_energy(r, g, pdv, WindField::still());
        EXPECT_GT(budget_excess(r, g, pdv, WindField::still(), rep, budget), 0.0) << "seed " << seed << " node " << v;
      }
    }
  }
}
