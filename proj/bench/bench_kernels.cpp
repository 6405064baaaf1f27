// Timing comparison of the serial reference kernels against the
// OpenMP-parallel ones: ensemble enumeration and multi-chain sampling.
// The parallel kernels must be bit-identical to the serial references.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <vector>

#include "nmc/lattice.hpp"
#include "nmc/model.hpp"
#include "nmc/oracle.hpp"
#include "nmc/sampler.hpp"

using namespace nmc;

namespace {

constexpr double kPi = 3.14159265358979323846;

template <class F>
double time_s(F&& f) {
  const auto start = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

int main() {
  const int threads = omp_get_max_threads();
  std::printf("threads available: %d\n\n", threads);

  {
    const LatticeGraph g = build_lattice(LatticeKind::lieb_square, {2});
    const CircuitParams p = couplings_from_times(0.13 * kPi, 0.21 * kPi);
    ExactEnsemble serial, parallel;
    const double t_serial = time_s([&] { serial = enumerate_ensemble(g, p, false); });
    const double t_omp = time_s([&] { parallel = enumerate_ensemble(g, p, true); });
    bool identical = serial.z_total == parallel.z_total;
    for (std::size_t m = 0; m < serial.z.size(); ++m)
      identical = identical && serial.z[m] == parallel.z[m];
    std::printf("ensemble enumeration, lieb L=2 (4096 outcomes x 512 states)\n");
    std::printf("  serial  %8.3f s\n", t_serial);
    std::printf("  openmp  %8.3f s   speedup %.2fx   bit-identical: %s\n\n", t_omp,
                t_serial / t_omp, identical ? "yes" : "NO");
  }

  {
    const LatticeGraph g = build_lattice(LatticeKind::lieb_square, {4});
    const CircuitParams p = couplings_from_times(0.15 * kPi, kPi / 4);
    Schedule sched{300, 30, 1};
    std::vector<ChainRecord> serial, parallel;
    const double t_serial =
        time_s([&] { serial = run_chains(g, p, sched, 42, 8, 0); });
    const double t_omp =
        time_s([&] { parallel = run_chains(g, p, sched, 42, 8, threads); });
    bool identical = serial.size() == parallel.size();
    for (std::size_t c = 0; identical && c < serial.size(); ++c)
      identical = serial[c].m_c == parallel[c].m_c;
    std::printf("metropolis chains, lieb L=4, 8 chains x 300 sweeps\n");
    std::printf("  serial  %8.3f s\n", t_serial);
    std::printf("  openmp  %8.3f s   speedup %.2fx   identical records: %s\n", t_omp,
                t_serial / t_omp, identical ? "yes" : "NO");
  }
  return 0;
}
