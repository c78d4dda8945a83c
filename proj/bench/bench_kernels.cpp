// Serial reference vs OpenMP for the two hot kernels: the 91-entry bracket table of g2
// and the finite-difference Weyl sweep. Results are compared before timings are printed.

#include "g2roll/g2alg.hpp"
#include "g2roll/numcheck.hpp"

#include <chrono>
#include <cstdio>

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace g2roll;

template <class F>
double seconds(F&& f, int reps) {
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / reps;
}

int main() {
#ifdef _OPENMP
  std::printf("threads: %d\n", omp_get_max_threads());
#else
  std::printf("threads: 1 (built without OpenMP)\n");
#endif
  const Params p(1, 1);
  const auto S = an_generators(p);
  const LieAlgebra g = generate_g2(S[0], S[1], S[2], main_chart());

  bool same = bracket_table(g.basis, Exec::Serial) == bracket_table(g.basis, Exec::Parallel);
  const double bs = seconds([&] { (void)bracket_table(g.basis, Exec::Serial); }, 5);
  const double bp = seconds([&] { (void)bracket_table(g.basis, Exec::Parallel); }, 5);
  std::printf("bracket_table  serial %.4fs  parallel %.4fs  speedup %.2f  identical %s\n", bs, bp, bs / bp,
              same ? "yes" : "NO");

  const AnChart chart = build_chart(p);
  const MetricCallback m = an_metric(chart);
  const auto pts = generic_points(p, 40, 11);
  const auto rs = weyl_sweep(m, pts, Exec::Serial), rp = weyl_sweep(m, pts, Exec::Parallel);
  bool wsame = rs.size() == rp.size();
  for (std::size_t i = 0; wsame && i < rs.size(); ++i) wsame = rs[i].weyl == rp[i].weyl;
  const double ws = seconds([&] { (void)weyl_sweep(m, pts, Exec::Serial); }, 3);
  const double wp = seconds([&] { (void)weyl_sweep(m, pts, Exec::Parallel); }, 3);
  std::printf("weyl_sweep     serial %.4fs  parallel %.4fs  speedup %.2f  identical %s\n", ws, wp, ws / wp,
              wsame ? "yes" : "NO");
  return same && wsame ? 0 : 1;
}
