#ifndef ROMP_PARALLEL_HPP
#define ROMP_PARALLEL_HPP

#include <romp/cbha.hpp>

#include <atomic>
#include <barrier>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

namespace romp
{

/// Odd multiplier used to derive worker seeds from the master seed.
inline constexpr std::uint64_t worker_seed_stride = 0x9E3779B97F4A7C15ULL;

struct WorkerPlan
{
  std::size_t worker_count = 1;
  std::size_t per_worker_population = 1;
  int aggregate_frequency = 10;
  std::vector<std::uint64_t> per_worker_seeds;

  /// Splits the configured population evenly (rounding up) over the workers.
  static WorkerPlan make(const PlannerConfig &config, std::size_t workers)
  {
    if (workers == 0)
      throw std::invalid_argument("WorkerPlan: need at least one worker");
    WorkerPlan plan;
    plan.worker_count = workers;
    const auto pop = static_cast<std::size_t>(config.population);
    plan.per_worker_population = (pop + workers - 1) / workers;
    plan.aggregate_frequency = config.aggregate_frequency;
    for (std::size_t w = 0; w < workers; ++w)
      plan.per_worker_seeds.push_back(config.rng_seed + w * worker_seed_stride);
    return plan;
  }

  void validate() const
  {
    if (worker_count == 0 || per_worker_population == 0 || aggregate_frequency < 1)
      throw std::invalid_argument("WorkerPlan: counts must be positive");
    if (per_worker_seeds.size() != worker_count)
      throw std::invalid_argument("WorkerPlan: one seed per worker required");
    for (std::size_t a = 0; a < worker_count; ++a)
      for (std::size_t b = a + 1; b < worker_count; ++b)
        if (per_worker_seeds[a] == per_worker_seeds[b])
          throw std::invalid_argument("WorkerPlan: worker seeds must be distinct");
  }
};

struct BlackHoleReport
{
  double metric = 0.0;
  Route route;
};

struct AggregateResult
{
  double metric = 0.0;
  Route route;
  std::size_t worker = 0;
};

/// Arg-max over the workers' black holes; the lowest worker id wins ties.
[[nodiscard]] inline AggregateResult aggregate(std::span<const BlackHoleReport> black_holes)
{
  if (black_holes.empty())
    throw std::invalid_argument("aggregate: no black holes");
  std::size_t best = 0;
  for (std::size_t w = 1; w < black_holes.size(); ++w)
    if (black_holes[w].metric > black_holes[best].metric)
      best = w;
  return {black_holes[best].metric, black_holes[best].route, best};
}

struct AggregationRecord
{
  int generation = 0;
  std::vector<double> worker_metrics; // before the exchange
  std::size_t winner = 0;
  double global_metric = 0.0;
};

struct ParallelResult
{
  Route route;
  double fitness = 0.0;
  double initial_fitness = 0.0;
  double metric = 0.0;
  std::vector<AggregationRecord> aggregations;
};

/// Island-style CBHA: each worker evolves its own population, and at every
/// F-th generation and the last one all workers stop at a barrier, publish
/// their black holes, and adopt the best. Results depend only on the plan.
[[nodiscard]] inline ParallelResult evolve_parallel(const Route &initial, const PlanningProblem &problem,
                                                    const PlannerConfig &config, const WorkerPlan &plan)
{
  plan.validate();
  ParallelResult out;
  out.initial_fitness = problem.evaluate(initial).fitness;
  if (config.generations == 0 || initial.empty())
  {
    out.route = initial;
    out.fitness = out.initial_fitness;
    out.metric = problem.metric(initial);
    return out;
  }

  const std::size_t workers = plan.worker_count;
  std::vector<BlackHoleReport> mailbox(workers);
  std::vector<Route> final_routes(workers);
  std::vector<double> final_metrics(workers, 0.0);
  std::vector<std::exception_ptr> errors(workers);
  std::atomic<bool> failed{false};
  std::barrier sync(static_cast<std::ptrdiff_t>(workers));

  auto body = [&](std::size_t w) {
    try
    {
      CbhaEngine engine(problem, initial, config, plan.per_worker_population, plan.per_worker_seeds[w]);
      for (int g = 1; g <= config.generations; ++g)
      {
        engine.step();
        if (g % plan.aggregate_frequency != 0 && g != config.generations)
          continue;

        mailbox[w] = {engine.black_hole_metric(), engine.black_hole()};
        sync.arrive_and_wait();
        if (failed.load())
          return sync.arrive_and_drop();
        const AggregateResult best = aggregate(mailbox);
        if (w == 0)
        {
          AggregationRecord rec{g, {}, best.worker, best.metric};
          for (const auto &m : mailbox)
            rec.worker_metrics.push_back(m.metric);
          out.aggregations.push_back(std::move(rec));
        }
        if (w != best.worker && engine.black_hole_metric() != best.metric)
          engine.adopt(best.route, best.metric);
        sync.arrive_and_wait(); // mailbox may be rewritten after this point
        if (failed.load())
          return sync.arrive_and_drop();
      }
      final_routes[w] = engine.black_hole();
      final_metrics[w] = engine.black_hole_metric();
    }
    catch (...)
    {
      errors[w] = std::current_exception();
      failed.store(true);
      sync.arrive_and_drop();
    }
  };

  if (workers == 1)
    body(0);
  else
  {
    std::vector<std::jthread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
      threads.emplace_back(body, w);
  }

  for (const auto &e : errors)
    if (e)
      std::rethrow_exception(e);

  out.route = final_routes[0];
  out.metric = final_metrics[0];
  out.fitness = problem.evaluate(out.route).fitness;
  return out;
}

} // namespace romp

#endif
