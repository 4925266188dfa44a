#pragma once

#include <iosfwd>
#include <string>

#include "matchstab/fixtures.hpp"
#include "matchstab/policy.hpp"

namespace matchstab {

/// Grid sweep over the symmetric product family on a 3x3 structure:
/// mu_C = mu_S = (x, y, 1-x-y) with x, y positive multiples of grid_step and
/// x + y < 1. Grid points with x + y >= 1 are emitted as comment markers.
struct SweepSpec {
  StructurePtr structure;
  std::optional<std::pair<std::vector<std::vector<int>>,
                          std::vector<std::vector<int>>>> priorities;
  PolicyKind policy = PolicyKind::MatchShortest;
  Rational grid_step;
  int64_t horizon = 100'000;
  int seeds_per_cell = 1;
  uint64_t base_seed = 1;
};

/// Streams CSV rows `x,y,policy,seed,horizon,avg_buffer,max_buffer,
/// empty_visits,ncond,scond`, one row per (cell, replication), cells in
/// row-major (x, y) order. The parallel flavour runs cells on OpenMP worker
/// threads; output is byte-identical to the serial run.
void run_sweep(const SweepSpec& spec, std::ostream& out, bool parallel);

/// One sweep cell rendered to its CSV rows (used by both flavours).
std::string sweep_cell_rows(const SweepSpec& spec, const Rational& x,
                            const Rational& y, uint64_t cell_index);

}  // namespace matchstab
