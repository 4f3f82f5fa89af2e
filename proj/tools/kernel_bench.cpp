// Timing harness for the data-parallel kernels: batch viewpoint gain scoring
// and FAS cluster scoring, serial reference vs OpenMP.

#include <chrono>
#include <iostream>
#include <random>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "shelf/fas.hpp"
#include "shelf/scene_gen.hpp"
#include "shelf/sensing.hpp"

using namespace shelf;
namespace chrono = std::chrono;

namespace {

double time_ms(const std::function<void()>& fn, int reps) {
  auto t0 = chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) fn();
  return chrono::duration<double, std::milli>(chrono::steady_clock::now() - t0).count() /
         reps;
}

}  // namespace

int main(int argc, char** argv) {
  int candidates = argc > 1 ? std::atoi(argv[1]) : 32;
  int reps = argc > 2 ? std::atoi(argv[2]) : 5;

  GroundTruthScene gt = generate_scene(7, SizeClass::Large, 7);
  BeliefGrid belief = BeliefGrid::make_unobserved(gt);
  Intrinsics intr;
  std::mt19937_64 rng(7);

  // Partially observe so gain scoring has real work on both cell classes.
  int next_id = 0;
  SensingBudget budget;
  DetectionCriterion crit;
  ias_run(gt, belief, budget, crit, intr, rng, next_id);

  std::vector<int32_t> interior = interior_camera_cells(belief);
  std::vector<Viewpoint> cands;
  for (int i = 0; i < candidates; ++i)
    cands.push_back(sample_viewpoint(rng, gt.spec, interior, std::nullopt));

  double serial_ms = time_ms(
      [&] { volatile auto s = score_viewpoints_serial(belief, cands, intr, {}); (void)s; }, reps);
  double parallel_ms = time_ms(
      [&] { volatile auto s = score_viewpoints_parallel(belief, cands, intr, {}); (void)s; },
      reps);

  auto serial_scores = score_viewpoints_serial(belief, cands, intr, {});
  auto parallel_scores = score_viewpoints_parallel(belief, cands, intr, {});
  bool match = serial_scores == parallel_scores;

#ifdef _OPENMP
  int threads = omp_get_max_threads();
#else
  int threads = 1;
#endif

  std::cout << "kernel: viewpoint gain scoring, " << candidates << " candidates, "
            << intr.rays_u << "x" << intr.rays_v << " rays\n";
  std::cout << "threads " << threads << "\n";
  std::cout << "serial   " << serial_ms << " ms\n";
  std::cout << "openmp   " << parallel_ms << " ms (speedup " << serial_ms / parallel_ms
            << "x)\n";
  std::cout << "scores match: " << (match ? "yes" : "NO") << "\n";
  return match ? 0 : 1;
}
