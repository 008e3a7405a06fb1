#ifndef ROMP_SCENARIO_HPP
#define ROMP_SCENARIO_HPP

#include <romp/energy.hpp>
#include <romp/model.hpp>
#include <romp/wind.hpp>

#include <cmath>
#include <algorithm>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace romp
{

struct ScenarioNode
{
  int id = 0;
  Vec3 position;
  SensorKind kind = SensorKind::temperature;
  double v_now = 0.0;
  friend bool operator==(const ScenarioNode &, const ScenarioNode &) = default;
};

struct Scenario
{
  double width = 0.0;
  double height = 0.0;
  std::vector<ScenarioNode> nodes;
  Vec3 start;
  Vec3 end;
  std::uint64_t seed = 0;
  friend bool operator==(const Scenario &, const Scenario &) = default;
};

struct CapacitorSpec
{
  double capacitance; // F
  double v_max;       // V
};

/// Storage capacitor fitted to each sensor kind.
[[nodiscard]] constexpr CapacitorSpec capacitor_for(SensorKind kind) noexcept
{
  return kind == SensorKind::temperature ? CapacitorSpec{6.0, 2.5} : CapacitorSpec{3.0, 5.0};
}

[[nodiscard]] inline std::string_view to_string(SensorKind k) noexcept
{
  return k == SensorKind::temperature ? "temperature" : "pressure";
}

[[nodiscard]] inline std::optional<SensorKind> parse_sensor_kind(std::string_view s) noexcept
{
  if (s == "temperature")
    return SensorKind::temperature;
  if (s == "pressure")
    return SensorKind::pressure;
  return std::nullopt;
}

[[nodiscard]] inline SensorNode make_sensor_node(const ScenarioNode &src, PrizeRange range = {})
{
  const CapacitorSpec cap = capacitor_for(src.kind);
  SensorNode n;
  n.id = src.id;
  n.position = src.position;
  n.capacitance = cap.capacitance;
  n.v_max = cap.v_max;
  n.v_now = src.v_now;
  n.prize = compute_prize(src.v_now, cap.v_max, range);
  return n;
}

[[nodiscard]] inline std::vector<SensorNode> sensor_nodes(const Scenario &s, PrizeRange range = {})
{
  std::vector<SensorNode> out;
  out.reserve(s.nodes.size());
  for (const auto &n : s.nodes)
    out.push_back(make_sensor_node(n, range));
  return out;
}

/// Uniform deployment over [0, width] x [0, height] with the base at the
/// centre. pressure_fraction is the probability a node is a pressure sensor.
[[nodiscard]] inline Scenario generate_scenario(std::size_t n, double width, double height, double pressure_fraction,
                                                std::uint64_t seed)
{
  if (n == 0)
    throw std::invalid_argument("generate_scenario: need at least one node");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(0.0, width), uy(0.0, height), u01(0.0, 1.0);
  Scenario s;
  s.width = width;
  s.height = height;
  s.seed = seed;
  s.start = s.end = Vec3{width / 2.0, height / 2.0, 0.0};
  s.nodes.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
  {
    ScenarioNode node;
    node.id = static_cast<int>(i);
    node.position = {ux(rng), uy(rng), 0.0};
    node.kind = u01(rng) < pressure_fraction ? SensorKind::pressure : SensorKind::temperature;
    node.v_now = u01(rng) * capacitor_for(node.kind).v_max;
    s.nodes.push_back(node);
  }
  return s;
}

/// Air-mass velocity for a compass heading: the name is the direction the
/// air moves toward (x east, y north).
[[nodiscard]] inline std::optional<Vec3> compass_wind(std::string_view heading, double speed) noexcept
{
  const double d = speed / std::numbers::sqrt2;
  if (heading == "east")
    return Vec3{speed, 0, 0};
  if (heading == "west")
    return Vec3{-speed, 0, 0};
  if (heading == "north")
    return Vec3{0, speed, 0};
  if (heading == "south")
    return Vec3{0, -speed, 0};
  if (heading == "north-east")
    return Vec3{d, d, 0};
  if (heading == "north-west")
    return Vec3{-d, d, 0};
  if (heading == "south-east")
    return Vec3{d, -d, 0};
  if (heading == "south-west")
    return Vec3{-d, -d, 0};
  return std::nullopt;
}

enum class WindModel
{
  still,
  constant,
  gusty
};

struct WindSpec
{
  WindModel model = WindModel::still;
  Vec3 mean;              // constant vector, or gusty mean
  double gust_amplitude = 3.0; // m/s, gusty only
  std::uint64_t seed = 0;
};

/// Grid of dims vertices with the given spacing starting at origin. Gusty
/// fields add a few seeded travelling sinusoids to the mean, so vectors vary
/// smoothly in space and time.
[[nodiscard]] inline WindField generate_wind(Vec3 origin, WindField::Dims dims, double cube_size, double time_step,
                                             std::size_t frames, const WindSpec &spec)
{
  if (frames == 0 || dims.nx < 2 || dims.ny < 2 || dims.nz < 2)
    throw std::invalid_argument("generate_wind: dims must be >= 2 and frames >= 1");
  const std::size_t nv = dims.nx * dims.ny * dims.nz;
  std::vector<std::vector<Vec3>> data(frames, std::vector<Vec3>(nv));
  if (spec.model == WindModel::still)
    return WindField(origin, cube_size, dims, time_step, std::move(data));
  if (spec.model == WindModel::constant)
  {
    for (auto &f : data)
      std::fill(f.begin(), f.end(), spec.mean);
    return WindField(origin, cube_size, dims, time_step, std::move(data));
  }

  struct Mode
  {
    double kx, ky, omega, phase;
    Vec3 dir;
  };
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double span = cube_size * static_cast<double>(std::max(dims.nx, dims.ny) - 1);
  std::vector<Mode> modes(4);
  for (auto &m : modes)
  {
    const double wavelength = span * (0.3 + 0.7 * u01(rng));
    const double theta = 2.0 * std::numbers::pi * u01(rng);
    const double k = 2.0 * std::numbers::pi / std::max(wavelength, cube_size);
    m.kx = k * std::cos(theta);
    m.ky = k * std::sin(theta);
    m.omega = 2.0 * std::numbers::pi / (300.0 + 900.0 * u01(rng));
    m.phase = 2.0 * std::numbers::pi * u01(rng);
    const double a = 2.0 * std::numbers::pi * u01(rng);
    m.dir = {std::cos(a), std::sin(a), 0.1 * (u01(rng) - 0.5)};
  }
  const double amp = spec.gust_amplitude / std::sqrt(static_cast<double>(modes.size()));
  for (std::size_t f = 0; f < frames; ++f)
  {
    const double t = static_cast<double>(f) * time_step;
    for (std::size_t iz = 0; iz < dims.nz; ++iz)
      for (std::size_t iy = 0; iy < dims.ny; ++iy)
        for (std::size_t ix = 0; ix < dims.nx; ++ix)
        {
          const double x = origin.x + cube_size * static_cast<double>(ix);
          const double y = origin.y + cube_size * static_cast<double>(iy);
          Vec3 v = spec.mean;
          for (const auto &m : modes)
            v = v + amp * std::sin(m.kx * x + m.ky * y - m.omega * t + m.phase) * m.dir;
          data[f][(iz * dims.ny + iy) * dims.nx + ix] = v;
        }
  }
  return WindField(origin, cube_size, dims, time_step, std::move(data));
}

/// Grid covering a scenario area up to cruise altitude.
[[nodiscard]] inline WindField generate_wind_for(const Scenario &s, const PdvParams &pdv, double cube_size,
                                                 double time_step, std::size_t frames, const WindSpec &spec)
{
  auto count = [&](double extent) { return static_cast<std::size_t>(std::ceil(extent / cube_size)) + 1; };
  const WindField::Dims dims{std::max<std::size_t>(count(s.width), 2), std::max<std::size_t>(count(s.height), 2),
                             std::max<std::size_t>(count(pdv.cruise_altitude), 2)};
  return generate_wind({0, 0, 0}, dims, cube_size, time_step, frames, spec);
}

} // namespace romp

#endif
