#ifndef ROMP_ATTRS_HPP
#define ROMP_ATTRS_HPP

#include <romp/cbha.hpp>
#include <romp/energy.hpp>
#include <romp/model.hpp>

#include <stdexcept>

namespace romp
{

/// Per-mission evaluation attributes.
struct Attrs
{
  double t = 0.0;         // s, solver wall-clock
  double e_re_star = 0.0; // J, recharged into visited nodes
  double e_de_star = 0.0; // Wh, discharged by the PDV
  double r_re = 0.0;      // %, of all rechargeable energy in the request
  double r_de = 0.0;      // %, of the PDV's initial energy
  double r_rd = 0.0;      // per-mille, recharged J per discharged J
};

[[nodiscard]] inline Attrs compute_attrs(double e_re_j, double e_de_wh, double rechargeable_j, double e_initial_wh,
                                         double elapsed_s)
{
  if (!(rechargeable_j > 0.0))
    throw std::domain_error("compute_attrs: no rechargeable energy in the request");
  if (!(e_initial_wh > 0.0))
    throw std::domain_error("compute_attrs: initial energy must be positive");
  Attrs a;
  a.t = elapsed_s;
  a.e_re_star = e_re_j;
  a.e_de_star = e_de_wh;
  a.r_re = e_re_j / rechargeable_j * 100.0;
  a.r_de = e_de_wh / e_initial_wh * 100.0;
  a.r_rd = e_de_wh > 0.0 ? e_re_j / (joules_per_wh * e_de_wh) * 1000.0 : 0.0;
  return a;
}

[[nodiscard]] inline Attrs compute_attrs(const EnergyReport &report, const MissionGraph &graph, double e_initial_wh,
                                         double elapsed_s)
{
  return compute_attrs(report.e_recharged, report.discharged(), total_rechargeable(graph), e_initial_wh, elapsed_s);
}

} // namespace romp

#endif
