#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "crossfit/configuration.hpp"

namespace crossfit {

struct SolveOptions {
  int max_iters = 200;
  double residual_tol = 1e-10;
  double step_tol = 1e-14;
  double damping = 1e-3;         // initial Levenberg parameter; x2 on reject, /3 on accept
  double rank_threshold = 1e-6;  // relative to the largest singular value
  std::optional<double> lambda_min;  // default 1e-4 x body circumradius estimate
  int seed_count = 32;
  std::uint64_t seed = 0;

  double resolve_lambda_min(const ImplicitBody& body) const {
    return lambda_min.value_or(1e-4 * body.circumradius_estimate());
  }
};

enum class Provenance { direct, continuation, sweep, oracle_refined };
enum class SolveStatus { converged, max_iters, stalled, degenerate, interior_lost };

std::string to_string(Provenance p);
std::string to_string(SolveStatus s);

struct Solution {
  CrossConfig config;
  double residual_norm = 0.0;
  int nullity = 0;
  int iterations = 0;
  Provenance provenance = Provenance::direct;
};

struct SolveOutcome {
  explicit SolveOutcome(CrossConfig best_iterate) : best(std::move(best_iterate)) {}

  SolveStatus status = SolveStatus::stalled;
  std::optional<Solution> solution;  // set iff status == converged
  CrossConfig best;                  // best iterate regardless of status
  double best_residual = 0.0;
  int iterations = 0;
  std::vector<double> residual_history;  // norm after each accepted step (monotone)
};

/// Levenberg-Marquardt over the chart (center, [scale], rotation tangent) with SVD
/// steps and retraction after each accepted step. Success iff the residual norm
/// drops below residual_tol.
SolveOutcome gauss_newton(const ImplicitBody& body, const CrossConfig& start, ResidualForm form,
                          const SolveOptions& opts);

struct SeedStat {
  SolveStatus status = SolveStatus::stalled;
  int iterations = 0;
  double best_residual = 0.0;
};

struct MultistartResult {
  std::vector<Solution> solutions;  // deduplicated, in seed order
  std::vector<SeedStat> seeds;
  int converged_count = 0;
};

/// Runs gauss_newton from seed_count randomized starts and deduplicates the
/// converged solutions by vertex-set Hausdorff distance (1e-6). Seeds may solve in
/// parallel; results are merged by seed index, so output is deterministic.
MultistartResult multistart_solve(const ImplicitBody& body, const BaseFrame& frame,
                                  ResidualForm form, const SolveOptions& opts);

enum class ContinuationStatus { reached_end, degenerate, stuck };

std::string to_string(ContinuationStatus s);

struct ContinuationTrace {
  std::vector<std::pair<double, Solution>> samples;  // t strictly increasing from 0
  ContinuationStatus status = ContinuationStatus::stuck;
  int accepted_steps = 0;
  int rejected_steps = 0;
  double min_dt = 0.0;
  double max_dt = 0.0;
};

/// Predictor-corrector tracking of start_solution from t = 0 to t = 1 in the
/// level-set form. Scale collapse below lambda_min is reported as degeneration.
ContinuationTrace continue_homotopy(const HomotopyFamily& family, const Solution& start_solution,
                                    const SolveOptions& opts);

struct NullityResult {
  int nullity = 0;
  int rank = 0;
  double gap = 0.0;  // smallest kept / largest discarded singular value; inf if clean
  Vec singular_values;
};

enum class JacobianMethod { analytic, finite_difference };

/// Rank analysis of the level-set chart Jacobian at a configuration. The nullity
/// (chart dimension minus numerical rank) estimates the local solution-family
/// dimension when the configuration is a solution.
NullityResult chart_nullity(const ImplicitBody& body, const CrossConfig& config,
                            const SolveOptions& opts,
                            JacobianMethod method = JacobianMethod::analytic);

int numerical_nullity(const ImplicitBody& body, const Solution& solution, const SolveOptions& opts);

struct SweepResult {
  std::vector<Solution> solutions;  // pairwise vertex-Hausdorff distance > step_size/10
  bool truncated = false;           // corrector failed mid-sweep
};

/// Walks the solution family: repeatedly steps along the smallest-singular-value
/// chart direction and re-corrects with gauss_newton.
SweepResult sweep_family(const ImplicitBody& body, const Solution& solution, int steps,
                         double step_size, const SolveOptions& opts);

/// Hausdorff distance between the two vertex sets, as point sets.
double vertex_hausdorff(const CrossConfig& a, const CrossConfig& b);

}  // namespace crossfit
