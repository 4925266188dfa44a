// Timing comparison of the serial and worker-pool sweep kernels on the same
// spec, with a byte-identity check between the two outputs.

#include <chrono>
#include <iostream>
#include <sstream>

#include "matchstab/fixtures.hpp"
#include "matchstab/simulate.hpp"
#include "matchstab/sweep.hpp"

using namespace matchstab;

namespace {

double time_sweep(const SweepSpec& spec, bool parallel, std::string& output) {
  std::ostringstream out;
  auto start = std::chrono::steady_clock::now();
  run_sweep(spec, out, parallel);
  auto stop = std::chrono::steady_clock::now();
  output = out.str();
  return std::chrono::duration<double>(stop - start).count();
}

}  // namespace

int main(int argc, char** argv) {
  SweepSpec spec;
  spec.structure = nn_structure();
  spec.priorities = {{nn_default_priority_a(), nn_default_priority_b()}};
  spec.policy = PolicyKind::MatchShortest;
  spec.grid_step = Rational(1, 10);
  spec.horizon = argc > 1 ? std::atoll(argv[1]) : 200'000;
  spec.seeds_per_cell = 2;
  spec.base_seed = 7;

  std::cout << "sweep benchmark: grid 1/10, horizon " << spec.horizon
            << ", 2 seeds per cell, " << worker_threads() << " worker thread(s)\n";

  std::string serial_csv, parallel_csv;
  double serial = time_sweep(spec, false, serial_csv);
  double parallel = time_sweep(spec, true, parallel_csv);

  std::cout << "serial:   " << serial << " s\n";
  std::cout << "parallel: " << parallel << " s\n";
  std::cout << "speedup:  " << serial / parallel << "x\n";
  if (serial_csv != parallel_csv) {
    std::cout << "outputs differ: FAIL\n";
    return 1;
  }
  std::cout << "outputs identical: ok\n";
  return 0;
}
