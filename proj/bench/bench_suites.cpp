// Benchmark: the OpenMP case dispatcher against the serial reference path
// of each verification suite. Both paths derive every case seed from the
// case index, so they must produce byte-identical reports; the benchmark
// re-checks that while timing both.
//
// Usage: bench_suites [max_points] [samples]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "tstruct/verify.hpp"

using namespace tstruct::verify;
using clk = std::chrono::steady_clock;

int main(int argc, char** argv) {
  SuiteOptions base;
  base.seed = 7;
  base.max_points = argc > 1 ? std::atoi(argv[1]) : 3;
  base.samples = argc > 2 ? std::atoi(argv[2]) : 10;

#ifdef _OPENMP
  std::printf("openmp: enabled, max threads %d\n", omp_get_max_threads());
#else
  std::printf("openmp: not compiled in (both columns run serially)\n");
#endif
  std::printf("window: max_points=%d samples=%d\n\n", base.max_points,
              base.samples);
  std::printf("%-22s %10s %10s %8s  %s\n", "suite", "serial", "parallel",
              "speedup", "reports");

  bool all_match = true;
  for (const auto& name : suite_names()) {
    SuiteOptions o = base;

    o.parallel = false;
    auto t0 = clk::now();
    auto serial = run_suite(name, o);
    double ts = std::chrono::duration<double>(clk::now() - t0).count();

    o.parallel = true;
    auto t1 = clk::now();
    auto parallel = run_suite(name, o);
    double tp = std::chrono::duration<double>(clk::now() - t1).count();

    bool match = report_lines(serial) == report_lines(parallel);
    all_match = all_match && match;
    std::printf("%-22s %9.3fs %9.3fs %7.2fx  %s\n", name.c_str(), ts, tp,
                tp > 0 ? ts / tp : 0.0, match ? "identical" : "DIFFER");
  }

  if (!all_match) {
    std::printf("\nserial and parallel reports differ\n");
    return 1;
  }
  return 0;
}
