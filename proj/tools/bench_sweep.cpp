// ============================================================================
// bench_sweep.cpp -- wall-time comparison of the scale sweep running with one
// worker thread versus the requested/available parallelism.
//
// Every grid point of a sweep is computed self-contained (its own seeds, its
// own sums), so the parallel run must agree with the serial one bit for bit;
// the benchmark checks that before reporting timings.
// ============================================================================

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "latenergy/sweep.hpp"

namespace {

using namespace laten;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

bool identical(const std::vector<PhasePoint>& a,
               const std::vector<PhasePoint>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].lambda != b[i].lambda || a[i].label != b[i].label ||
        a[i].energy != b[i].energy ||
        a[i].parameter.size() != b[i].parameter.size()) {
      return false;
    }
    for (int k = 0; k < a[i].parameter.size(); ++k) {
      if (a[i].parameter[k] != b[i].parameter[k]) return false;
    }
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"scale-sweep benchmark: serial reference vs. parallel kernels"};
  int dim = 2;
  double start = 0.7, stop = 1.0, step = 0.01;
  int threads = 0;  // 0 = available parallelism
  int repeats = 1;
  app.add_option("--dim", dim, "Family dimension: 2 or 3")->capture_default_str();
  app.add_option("--start", start, "First scale")->capture_default_str();
  app.add_option("--stop", stop, "Last scale")->capture_default_str();
  app.add_option("--step", step, "Scale increment")->capture_default_str();
  app.add_option("--threads", threads,
                 "Parallel worker count (0 = available parallelism)")
      ->capture_default_str();
  app.add_option("--repeats", repeats, "Timing repetitions")->capture_default_str();
  CLI11_PARSE(app, argc, argv);
  if (dim != 2 && dim != 3) {
    std::fprintf(stderr, "error: --dim must be 2 or 3\n");
    return 1;
  }

  const LambdaGrid grid{start, stop, step};
  const PotentialSpec pot = LennardJones{};
  MinimizeOptions mopts;
  if (dim == 3) mopts.random_seeds_3d = 32;  // keep the benchmark tractable

  const int parallel = resolve_threads(threads);
  std::printf("sweep%dd over [%g, %g] step %g (%zu points), comparing 1 vs %d "
              "threads\n",
              dim, start, stop, step, grid.values().size(), parallel);

  const auto run = [&](int nthreads) {
    return dim == 2 ? sweep_2d(grid, pot, nthreads, mopts)
                    : sweep_3d(grid, pot, nthreads, mopts);
  };

  // Warm-up + correctness: serial reference against the parallel kernels.
  const std::vector<PhasePoint> serial_result = run(1);
  const std::vector<PhasePoint> parallel_result = run(parallel);
  if (!identical(serial_result, parallel_result)) {
    std::fprintf(stderr, "error: parallel sweep deviates from the serial "
                         "reference\n");
    return 2;
  }
  std::printf("parallel result is bit-identical to the serial reference\n");

  double t_serial = 0.0, t_parallel = 0.0;
  for (int r = 0; r < repeats; ++r) {
    auto t0 = std::chrono::steady_clock::now();
    (void)run(1);
    t_serial += seconds_since(t0);
    t0 = std::chrono::steady_clock::now();
    (void)run(parallel);
    t_parallel += seconds_since(t0);
  }
  t_serial /= repeats;
  t_parallel /= repeats;

  std::printf("%-10s %12s %14s\n", "threads", "seconds", "points/s");
  std::printf("%-10d %12.3f %14.1f\n", 1, t_serial,
              serial_result.size() / t_serial);
  std::printf("%-10d %12.3f %14.1f\n", parallel, t_parallel,
              parallel_result.size() / t_parallel);
  std::printf("speedup: %.2fx\n", t_serial / t_parallel);
  return 0;
}
