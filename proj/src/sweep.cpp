#include "matchstab/sweep.hpp"

#include <cinttypes>
#include <cstdio>
#include <ostream>
#include <vector>

#include "matchstab/analysis.hpp"
#include "matchstab/flow.hpp"
#include "matchstab/simulate.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace matchstab {
namespace {

std::vector<Rational> grid_points(const Rational& step) {
  std::vector<Rational> out;
  if (!step.is_positive()) throw Error(Errc::BadInput, "grid step must be positive");
  for (Rational v = step; v < Rational(1); v += step) out.push_back(v);
  return out;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

std::string sweep_cell_rows(const SweepSpec& spec, const Rational& x,
                            const Rational& y, uint64_t cell_index) {
  if (Rational(1) <= x + y)
    return "# skipped x=" + x.to_decimal_string() + " y=" +
           y.to_decimal_string() + " reason=no-full-support\n";

  ArrivalMeasure measure = symmetric_product_measure(spec.structure, x, y);
  const MatchingStructure& g = measure.structure();
  auto [mu_c, mu_s] = measure.marginals();
  bool ncond = check_ncond(g, mu_c, mu_s);
  bool scond = check_scond(g, measure).holds;

  std::string rows;
  auto emit_row = [&](int rep, const char* avg, int64_t max_buffer,
                      int64_t empty_visits) {
    rows += x.to_decimal_string() + "," + y.to_decimal_string() + "," +
            policy_name(spec.policy) + "," + std::to_string(rep) + "," +
            std::to_string(spec.horizon) + "," + avg + "," +
            std::to_string(max_buffer) + "," + std::to_string(empty_visits) +
            "," + (ncond ? "true" : "false") + "," +
            (scond ? "true" : "false") + "\n";
  };

  if (spec.policy == PolicyKind::Flow && !ncond) {
    return "# skipped x=" + x.to_decimal_string() + " y=" +
           y.to_decimal_string() + " reason=flow-policy-needs-ncond\n";
  }
  PolicySpec policy =
      PolicySpec::make(spec.policy, measure.structure_ptr(), &measure,
                       spec.priorities);
  auto reports = simulate_batch(g, measure, policy, spec.horizon, spec.base_seed,
                                cell_index, spec.seeds_per_cell, false);
  for (int rep = 0; rep < spec.seeds_per_cell; ++rep)
    emit_row(rep, format_double(reports[rep].avg_buffer).c_str(),
             reports[rep].max_buffer, reports[rep].empty_visits);
  return rows;
}

void run_sweep(const SweepSpec& spec, std::ostream& out, bool parallel) {
  if (spec.structure->customer_count() != 3 ||
      spec.structure->server_count() != 3)
    throw Error(Errc::BadInput, "sweeps run on 3x3 structures");
  if (spec.seeds_per_cell < 1)
    throw Error(Errc::BadInput, "need at least one replication per cell");

  auto points = grid_points(spec.grid_step);
  struct Cell {
    Rational x, y;
  };
  std::vector<Cell> cells;
  for (const auto& x : points)
    for (const auto& y : points) cells.push_back({x, y});

  out << "x,y,policy,seed,horizon,avg_buffer,max_buffer,empty_visits,ncond,scond\n";

  std::vector<std::string> rendered(cells.size());
  std::vector<std::exception_ptr> errors(cells.size());
#ifdef _OPENMP
  int threads = parallel ? worker_threads() : 1;
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (size_t i = 0; i < cells.size(); ++i) {
    try {
      rendered[i] = sweep_cell_rows(spec, cells[i].x, cells[i].y, i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
#else
  (void)parallel;
  for (size_t i = 0; i < cells.size(); ++i) {
    try {
      rendered[i] = sweep_cell_rows(spec, cells[i].x, cells[i].y, i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
#endif
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  for (const auto& r : rendered) out << r;
}

}  // namespace matchstab
