#pragma once

#include "crossfit/solver.hpp"

namespace crossfit {

/// Grid resolutions for the d = 3 brute-force scan. The two full angles get
/// euler_resolution points each; the polar angle gets euler_resolution/2 + 1 so the
/// angular spacing matches. Total grid points must stay below 1e8.
struct GridSpec {
  int euler_resolution = 24;
  int center_resolution = 9;   // per axis, spanning +-0.3 x inradius around the interior point
  int scale_resolution = 17;   // spanning [0.2, 2] x inradius
  double coarse_tol = 0.05;
};

/// Scans ZYZ Euler angles x centers x scales, keeps grid cells whose max vertex
/// defect is below coarse_tol, and returns cluster representatives (local minima at
/// grid scale) sorted by ascending defect. Deterministic; cells evaluate in parallel.
std::vector<CrossConfig> brute_force_search(const ImplicitBody& body, const BaseFrame& frame,
                                            const GridSpec& spec);

struct RefineResult {
  std::vector<Solution> solutions;  // converged and deduplicated, provenance oracle_refined
  int attempted = 0;
  int dropped = 0;  // candidates that failed to converge
};

/// Polishes brute-force candidates with gauss_newton (level-set form).
RefineResult refine_candidates(const ImplicitBody& body, const std::vector<CrossConfig>& candidates,
                               const SolveOptions& opts);

}  // namespace crossfit
