#ifndef ROMP_MODEL_HPP
#define ROMP_MODEL_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace romp
{

struct Vec3
{
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend constexpr Vec3 operator+(Vec3 a, Vec3 b) noexcept { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend constexpr Vec3 operator-(Vec3 a, Vec3 b) noexcept { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend constexpr Vec3 operator*(double s, Vec3 a) noexcept { return {s * a.x, s * a.y, s * a.z}; }
  friend constexpr Vec3 operator*(Vec3 a, double s) noexcept { return s * a; }
  friend constexpr bool operator==(Vec3, Vec3) noexcept = default;

  [[nodiscard]] double norm() const noexcept { return std::sqrt(x * x + y * y + z * z); }
};

/// Euclidean distance in metres.
[[nodiscard]] inline double distance(Vec3 a, Vec3 b) noexcept { return (a - b).norm(); }

/// Distance of the projections onto the ground plane. Routing costs use this;
/// altitude changes are priced by the energy model.
[[nodiscard]] inline double ground_distance(Vec3 a, Vec3 b) noexcept
{
  return std::hypot(a.x - b.x, a.y - b.y);
}

enum class SensorKind
{
  temperature,
  pressure
};

struct SensorNode
{
  int id = 0;
  Vec3 position;
  double capacitance = 1.0; // F
  double v_max = 1.0;       // V
  double v_now = 0.0;       // V
  int prize = 1;
};

/// Inclusive integer prize range.
struct PrizeRange
{
  int lower = 1;
  int upper = 10;
};

/// Maps a capacitor voltage to a prize. [0, v_max] is cut into equal
/// intervals, one per prize value; the emptiest interval gets the highest
/// prize. A voltage exactly on an interval boundary belongs to the upper
/// (higher-voltage, lower-prize) interval.
[[nodiscard]] inline int compute_prize(double v_now, double v_max, PrizeRange range = {})
{
  if (!(v_max > 0.0))
    throw std::domain_error("compute_prize: v_max must be positive");
  if (v_now < 0.0 || v_now > v_max)
    throw std::domain_error("compute_prize: v_now outside [0, v_max]");
  if (range.lower > range.upper)
    throw std::domain_error("compute_prize: empty prize range");

  const int intervals = range.upper - range.lower + 1;
  auto k = static_cast<int>(std::floor(v_now * intervals / v_max));
  k = std::clamp(k, 0, intervals - 1);
  return range.upper - k;
}

struct PlannerConfig
{
  int prize_lower = 6;  // l
  int prize_upper = 10; // u
  int prize_budget = 150; // w_max

  double w_re = 50.0;
  double w_de = 50.0;

  int population = 80;   // N_pop
  int generations = 80;  // N_gen
  int search_number = 10; // N_srch
  double attraction_probability = 0.75; // P_a
  int aggregate_frequency = 10;         // F
  int init_swaps = 2;

  double e_de_cap_fraction = 0.8;
  std::uint64_t rng_seed = 1;

  // initial solver
  double gls_lambda_factor = 0.1;
  int gls_iterations_per_node = 200;
  int prize_step_small = 5;
  int prize_step_large = 50;
  double prize_step_large_gap_wh = 80.0;

  void validate() const
  {
    if (prize_lower > prize_upper)
      throw std::invalid_argument("PlannerConfig: prize_lower > prize_upper");
    if (attraction_probability < 0.0 || attraction_probability > 1.0)
      throw std::invalid_argument("PlannerConfig: attraction_probability outside [0, 1]");
    if (!(e_de_cap_fraction > 0.0 && e_de_cap_fraction < 1.0))
      throw std::invalid_argument("PlannerConfig: e_de_cap_fraction outside (0, 1)");
    if (population < 1 || generations < 0 || search_number < 1 || aggregate_frequency < 1)
      throw std::invalid_argument("PlannerConfig: population/search/aggregate counts must be positive");
    if (w_re < 0.0 || w_de < 0.0)
      throw std::invalid_argument("PlannerConfig: fitness weights must be non-negative");
  }
};

/// Ordered visits between the implicit start and end positions. Entries are
/// indices into MissionGraph::nodes(), not sensor ids.
struct Route
{
  std::vector<std::size_t> visits;

  [[nodiscard]] std::size_t size() const noexcept { return visits.size(); }
  [[nodiscard]] bool empty() const noexcept { return visits.empty(); }
  friend bool operator==(const Route &, const Route &) = default;
};

class EmptyGraphError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class InvalidRouteError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Complete graph over the eligible sensor nodes plus the start and end
/// positions. Immutable once built; share freely between threads.
class MissionGraph
{
public:
  MissionGraph(std::vector<SensorNode> nodes, Vec3 start, Vec3 end)
      : nodes_(std::move(nodes)), start_(start), end_(end)
  {
    const std::size_t m = nodes_.size() + 2;
    dist_.assign(m * m, 0.0);
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = a + 1; b < m; ++b)
      {
        const double d = ground_distance(position(a), position(b));
        dist_[a * m + b] = d;
        dist_[b * m + a] = d;
      }
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      index_of_id_.emplace(nodes_[i].id, i);
  }

  [[nodiscard]] std::size_t size() const noexcept { return nodes_.size(); }
  [[nodiscard]] std::span<const SensorNode> nodes() const noexcept { return nodes_; }
  [[nodiscard]] const SensorNode &node(std::size_t i) const { return nodes_.at(i); }
  [[nodiscard]] Vec3 start() const noexcept { return start_; }
  [[nodiscard]] Vec3 end() const noexcept { return end_; }

  /// Sentinel vertex indices in the distance table.
  [[nodiscard]] std::size_t start_index() const noexcept { return nodes_.size(); }
  [[nodiscard]] std::size_t end_index() const noexcept { return nodes_.size() + 1; }

  [[nodiscard]] Vec3 position(std::size_t v) const
  {
    if (v == start_index())
      return start_;
    if (v == end_index())
      return end_;
    return nodes_.at(v).position;
  }

  /// Ground distance between table vertices (nodes, start, end).
  [[nodiscard]] double dist(std::size_t a, std::size_t b) const noexcept
  {
    return dist_[a * (nodes_.size() + 2) + b];
  }

  [[nodiscard]] std::size_t index_of(int id) const
  {
    auto it = index_of_id_.find(id);
    if (it == index_of_id_.end())
      throw InvalidRouteError("unknown node id " + std::to_string(id));
    return it->second;
  }

  [[nodiscard]] int total_prize() const noexcept
  {
    int s = 0;
    for (const auto &n : nodes_)
      s += n.prize;
    return s;
  }

private:
  std::vector<SensorNode> nodes_;
  Vec3 start_;
  Vec3 end_;
  std::vector<double> dist_;
  std::unordered_map<int, std::size_t> index_of_id_;
};

/// Keeps nodes whose prize is at least the configured lower bound.
[[nodiscard]] inline MissionGraph build_graph(std::span<const SensorNode> nodes, Vec3 start, Vec3 end,
                                              const PlannerConfig &config)
{
  if (nodes.empty())
    throw EmptyGraphError("build_graph: no sensor nodes given");
  std::vector<SensorNode> kept;
  for (const auto &n : nodes)
    if (n.prize >= config.prize_lower)
      kept.push_back(n);
  if (kept.empty())
    throw EmptyGraphError("build_graph: every node has prize below the lower bound");
  return MissionGraph(std::move(kept), start, end);
}

namespace detail
{
inline void check_membership(const Route &route, const MissionGraph &graph)
{
  for (auto v : route.visits)
    if (v >= graph.size())
      throw InvalidRouteError("route references node index " + std::to_string(v) + " outside the graph");
}
} // namespace detail

/// start -> visits... -> end, in metres.
[[nodiscard]] inline double route_total_distance(const Route &route, const MissionGraph &graph)
{
  detail::check_membership(route, graph);
  std::size_t prev = graph.start_index();
  double total = 0.0;
  for (auto v : route.visits)
  {
    total += graph.dist(prev, v);
    prev = v;
  }
  return total + graph.dist(prev, graph.end_index());
}

[[nodiscard]] inline int route_collected_prize(const Route &route, const MissionGraph &graph)
{
  detail::check_membership(route, graph);
  int total = 0;
  for (auto v : route.visits)
    total += graph.node(v).prize;
  return total;
}

enum class RouteMode
{
  tsp,
  op
};

enum class Violation
{
  duplicate,
  unknown_node,
  coverage,
  open_tour
};

struct RouteViolation
{
  Violation kind;
  std::size_t node; // offending index; unused for open_tour
};

/// Structured validity check. Empty result means the route is valid.
[[nodiscard]] inline std::vector<RouteViolation> validate_route(const Route &route, const MissionGraph &graph,
                                                                RouteMode mode = RouteMode::op)
{
  std::vector<RouteViolation> out;
  std::vector<char> seen(graph.size(), 0);
  for (auto v : route.visits)
  {
    if (v >= graph.size())
    {
      out.push_back({Violation::unknown_node, v});
      continue;
    }
    if (seen[v])
      out.push_back({Violation::duplicate, v});
    seen[v] = 1;
  }
  if (mode == RouteMode::tsp)
  {
    for (std::size_t i = 0; i < graph.size(); ++i)
      if (!seen[i])
        out.push_back({Violation::coverage, i});
    if (!(graph.start() == graph.end()))
      out.push_back({Violation::open_tour, 0});
  }
  return out;
}

[[nodiscard]] inline const char *to_string(Violation v) noexcept
{
  switch (v)
  {
  case Violation::duplicate:
    return "duplicate";
  case Violation::unknown_node:
    return "unknown_node";
  case Violation::coverage:
    return "coverage";
  case Violation::open_tour:
    return "open_tour";
  }
  return "?";
}

} // namespace romp

#endif
