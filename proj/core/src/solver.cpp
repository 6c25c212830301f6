#include "crossfit/solver.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "parallel.hpp"

namespace crossfit {

namespace {

constexpr double kDampingCap = 1e13;
constexpr double kDampingFloor = 1e-15;
constexpr double kDedupTol = 1e-6;
constexpr int kReorthonormalizeEvery = 10;

struct ResidualEval {
  Vec values;
  double lambda_chord = 0.0;  // s_mean / 2, chord form only
};

ResidualEval eval_residual(const ImplicitBody& body, const CrossConfig& config,
                           ResidualForm form) {
  ResidualEval out;
  if (form == ResidualForm::levelset) {
    out.values = residual_levelset(body, config).values;
  } else {
    const ChordData data = chords(body, config.center, config.rotation, config.frame);
    out.values = chord_projection(data);
    out.lambda_chord = 0.5 * data.s.mean();
  }
  return out;
}

double solution_scale(const CrossConfig& config, const ResidualEval& eval, ResidualForm form) {
  return form == ResidualForm::levelset ? config.scale : eval.lambda_chord;
}

}  // namespace

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::direct: return "direct";
    case Provenance::continuation: return "continuation";
    case Provenance::sweep: return "sweep";
    case Provenance::oracle_refined: return "oracle_refined";
  }
  return "unknown";
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::max_iters: return "max_iters";
    case SolveStatus::stalled: return "stalled";
    case SolveStatus::degenerate: return "degenerate";
    case SolveStatus::interior_lost: return "interior_lost";
  }
  return "unknown";
}

std::string to_string(ContinuationStatus s) {
  switch (s) {
    case ContinuationStatus::reached_end: return "reached_end";
    case ContinuationStatus::degenerate: return "degenerate";
    case ContinuationStatus::stuck: return "stuck";
  }
  return "unknown";
}

double vertex_hausdorff(const CrossConfig& a, const CrossConfig& b) {
  const std::vector<Vec> va = vertices(a);
  const std::vector<Vec> vb = vertices(b);
  auto directed = [](const std::vector<Vec>& from, const std::vector<Vec>& to) {
    double worst = 0.0;
    for (const Vec& p : from) {
      double best = std::numeric_limits<double>::infinity();
      for (const Vec& q : to) best = std::min(best, (p - q).norm());
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(va, vb), directed(vb, va));
}

SolveOutcome gauss_newton(const ImplicitBody& body, const CrossConfig& start, ResidualForm form,
                          const SolveOptions& opts) {
  const int d = body.dim();
  if (start.dim() != d) throw InputError("gauss_newton: dimension mismatch");
  if (form == ResidualForm::chord) {
    if (!body.convex()) throw UnsupportedFormError("gauss_newton: chord form requires a convex body");
    if (!start.frame.regular())
      throw PreconditionError("gauss_newton: chord form requires a regular frame");
    if (!(body.evaluate(start.center) < 0.0))
      throw PreconditionError("gauss_newton: start center is not interior");
  }
  const double lambda_min = opts.resolve_lambda_min(body);

  CrossConfig state = start;
  ResidualEval eval = eval_residual(body, state, form);
  double norm = eval.values.norm();
  double cost = 0.5 * norm * norm;

  SolveOutcome out(CrossConfig(state.center, solution_scale(state, eval, form), state.rotation,
                               state.frame));
  out.best_residual = norm;
  out.residual_history.push_back(norm);

  auto finish_converged = [&](int iters) {
    CrossConfig final(state.center, solution_scale(state, eval, form), state.rotation, state.frame);
    Solution sol{final, norm, 0, iters, Provenance::direct};
    sol.nullity = numerical_nullity(body, sol, opts);
    out.status = SolveStatus::converged;
    out.solution = sol;
    out.best = final;
    out.best_residual = norm;
    out.iterations = iters;
  };

  if (norm < opts.residual_tol) {
    finish_converged(0);
    return out;
  }

  double mu = opts.damping;
  int accepted = 0;
  int since_reorthonormalize = 0;

  while (accepted < opts.max_iters) {
    const Mat jac = residual_jacobian(body, state, form);
    Eigen::JacobiSVD<Mat> svd(jac, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vec& sv = svd.singularValues();
    const Vec utr = svd.matrixU().transpose() * eval.values;

    bool stepped = false;
    bool interior_reject = false;
    while (mu <= kDampingCap) {
      Vec coeff(sv.size());
      for (int i = 0; i < sv.size(); ++i)
        coeff[i] = -sv[i] / (sv[i] * sv[i] + mu) * utr[i];
      const Vec step = svd.matrixV() * coeff;

      // Trial point; reject steps that leave the valid chart region.
      const double trial_scale =
          form == ResidualForm::levelset ? state.scale + step[d] : state.scale;
      if (trial_scale <= 0.0) {
        mu *= 2.0;
        continue;
      }
      Rotation trial_rot = retract(state.rotation, step.tail(tangent_dim(d)));
      CrossConfig trial(state.center + step.head(d), trial_scale, std::move(trial_rot),
                        state.frame);
      if (form == ResidualForm::chord && !(body.evaluate(trial.center) < 0.0)) {
        interior_reject = true;
        mu *= 2.0;
        continue;
      }
      const ResidualEval trial_eval = eval_residual(body, trial, form);
      const double trial_norm = trial_eval.values.norm();
      const double trial_cost = 0.5 * trial_norm * trial_norm;
      if (trial_cost >= cost) {
        mu *= 2.0;
        continue;
      }

      // Accepted.
      state = std::move(trial);
      eval = trial_eval;
      norm = trial_norm;
      cost = trial_cost;
      mu = std::max(mu / 3.0, kDampingFloor);
      ++accepted;
      out.residual_history.push_back(norm);
      if (++since_reorthonormalize >= kReorthonormalizeEvery) {
        state.rotation = state.rotation.reorthonormalized();
        since_reorthonormalize = 0;
      }
      if (norm < out.best_residual) {
        out.best = CrossConfig(state.center, solution_scale(state, eval, form), state.rotation,
                               state.frame);
        out.best_residual = norm;
      }

      const double scale_now = solution_scale(state, eval, form);
      if (scale_now < lambda_min) {
        out.status = SolveStatus::degenerate;
        out.iterations = accepted;
        return out;
      }
      if (norm < opts.residual_tol) {
        finish_converged(accepted);
        return out;
      }
      if (step.norm() < opts.step_tol) {
        out.status = SolveStatus::stalled;
        out.iterations = accepted;
        return out;
      }
      stepped = true;
      break;
    }

    if (!stepped) {
      out.status = interior_reject ? SolveStatus::interior_lost : SolveStatus::stalled;
      out.iterations = accepted;
      return out;
    }
  }

  out.status = SolveStatus::max_iters;
  out.iterations = accepted;
  return out;
}

MultistartResult multistart_solve(const ImplicitBody& body, const BaseFrame& frame,
                                  ResidualForm form, const SolveOptions& opts) {
  const int d = body.dim();
  if (frame.dim() != d) throw InputError("multistart_solve: frame dimension mismatch");
  if (form == ResidualForm::chord && !body.convex())
    throw UnsupportedFormError("multistart_solve: chord form requires a convex body");
  if (opts.seed_count < 1) throw InputError("multistart_solve: seed_count must be >= 1");

  SolveOptions resolved = opts;
  resolved.lambda_min = opts.resolve_lambda_min(body);
  const double inradius = body.inradius_estimate();
  const Vec& interior = body.interior_point();

  const std::size_t n = static_cast<std::size_t>(opts.seed_count);
  std::vector<SeedStat> stats(n);
  std::vector<std::optional<Solution>> found(n);

  detail::parallel_for(n, [&](std::size_t k) {
    const std::uint64_t sk = opts.seed + k;
    const Rotation rot = random_rotation(sk, d);
    std::mt19937_64 rng(sk ^ 0x9e3779b97f4a7c15ULL);
    std::normal_distribution<double> normal(0.0, 1.0);
    Vec jitter(d);
    for (int i = 0; i < d; ++i) jitter[i] = 0.1 * inradius * normal(rng);
    for (int tries = 0; tries < 60 && !(body.evaluate(interior + jitter) < 0.0); ++tries)
      jitter *= 0.5;
    const Vec center = interior + jitter;

    const Mat axes = rot.matrix() * frame.matrix();
    double mean_chord = 0.0;
    for (int i = 0; i < d; ++i) {
      const Vec u = axes.col(i).normalized();
      mean_chord += body.ray_intersect(center, u) + body.ray_intersect(center, -u);
    }
    mean_chord /= d;

    const CrossConfig start(center, 0.5 * mean_chord, rot, frame);
    const SolveOutcome outcome = gauss_newton(body, start, form, resolved);
    stats[k] = SeedStat{outcome.status, outcome.iterations, outcome.best_residual};
    if (outcome.status == SolveStatus::converged) found[k] = outcome.solution;
  });

  MultistartResult result;
  result.seeds = std::move(stats);
  for (std::size_t k = 0; k < n; ++k) {
    if (!found[k]) continue;
    ++result.converged_count;
    bool duplicate = false;
    for (const Solution& kept : result.solutions) {
      if (vertex_hausdorff(kept.config, found[k]->config) <= kDedupTol) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) result.solutions.push_back(std::move(*found[k]));
  }
  return result;
}

namespace {

double chart_distance(const CrossConfig& a, const CrossConfig& b) {
  const double dc = (a.center - b.center).squaredNorm();
  const double ds = (a.scale - b.scale) * (a.scale - b.scale);
  const double dr = rotation_log(a.rotation, b.rotation).squaredNorm();
  return std::sqrt(dc + ds + dr);
}

}  // namespace

ContinuationTrace continue_homotopy(const HomotopyFamily& family, const Solution& start_solution,
                                    const SolveOptions& opts) {
  const int d = family.dim();
  if (start_solution.config.dim() != d) throw InputError("continue_homotopy: dimension mismatch");
  const double start_norm =
      residual_levelset(family.start(), start_solution.config).values.norm();
  if (!(start_norm < 10.0 * opts.residual_tol))
    throw PreconditionError("continue_homotopy: start solution does not solve the start body");

  SolveOptions resolved = opts;
  if (!resolved.lambda_min) {
    resolved.lambda_min = 1e-4 * std::max(family.start().circumradius_estimate(),
                                          family.end().circumradius_estimate());
  }

  ContinuationTrace trace;
  trace.samples.emplace_back(0.0, start_solution);
  trace.min_dt = std::numeric_limits<double>::infinity();
  trace.max_dt = 0.0;

  CrossConfig config = start_solution.config;
  double t = 0.0;
  double dt = 0.05;
  int successes = 0;

  while (t < 1.0) {
    const double t_next = (1.0 - t <= dt) ? 1.0 : t + dt;
    const double step_dt = t_next - t;

    bool ok = false;
    bool degenerate = false;
    std::optional<Solution> corrected;
    try {
      // Euler predictor along the least-squares solution of J * delta = -dr/dt * dt.
      const ImplicitBody body_t = family.body_at(t);
      const Mat jac = residual_jacobian(body_t, config, ResidualForm::levelset);
      const std::vector<Vec> verts = vertices(config);
      Vec ddt(2 * d);
      for (int i = 0; i < 2 * d; ++i)
        ddt[i] = family.end().evaluate(verts[i]) - family.start().evaluate(verts[i]);
      Eigen::JacobiSVD<Mat> svd(jac, Eigen::ComputeThinU | Eigen::ComputeThinV);
      const Vec& sv = svd.singularValues();
      const double cutoff = sv.size() > 0 ? opts.rank_threshold * sv[0] : 0.0;
      const Vec utr = svd.matrixU().transpose() * ddt;
      Vec coeff = Vec::Zero(sv.size());
      for (int i = 0; i < sv.size(); ++i)
        if (sv[i] > cutoff) coeff[i] = -utr[i] / sv[i];
      const Vec delta = svd.matrixV() * coeff * step_dt;
      const CrossConfig predicted = apply_chart_step(config, delta, ResidualForm::levelset);

      const ImplicitBody body_next = family.body_at(t_next);
      const SolveOutcome outcome =
          gauss_newton(body_next, predicted, ResidualForm::levelset, resolved);
      if (outcome.status == SolveStatus::degenerate) {
        degenerate = true;
      } else if (outcome.status == SolveStatus::converged &&
                 chart_distance(config, outcome.solution->config) < 0.5) {
        corrected = outcome.solution;
        ok = true;
      }
    } catch (const InputError&) {
      ok = false;  // predictor left the chart (e.g. non-positive scale); retry smaller
    }

    if (degenerate) {
      trace.status = ContinuationStatus::degenerate;
      return trace;
    }
    if (ok) {
      t = t_next;
      corrected->provenance = Provenance::continuation;
      config = corrected->config;
      trace.samples.emplace_back(t, std::move(*corrected));
      ++trace.accepted_steps;
      trace.min_dt = std::min(trace.min_dt, step_dt);
      trace.max_dt = std::max(trace.max_dt, step_dt);
      if (++successes >= 3) {
        dt = std::min(dt * 1.5, 0.2);
        successes = 0;
      }
    } else {
      ++trace.rejected_steps;
      successes = 0;
      dt *= 0.5;
      if (dt < 1e-6) {
        trace.status = ContinuationStatus::stuck;
        return trace;
      }
    }
  }
  trace.status = ContinuationStatus::reached_end;
  return trace;
}

NullityResult chart_nullity(const ImplicitBody& body, const CrossConfig& config,
                            const SolveOptions& opts, JacobianMethod method) {
  const Mat jac = method == JacobianMethod::analytic
                      ? residual_jacobian(body, config, ResidualForm::levelset)
                      : residual_jacobian_fd(body, config, ResidualForm::levelset);
  const int n = static_cast<int>(jac.cols());
  Eigen::JacobiSVD<Mat> svd(jac);
  const Vec& sv = svd.singularValues();
  const int r = static_cast<int>(sv.size());

  NullityResult result;
  result.singular_values = Vec::Zero(n);
  result.singular_values.head(r) = sv;
  const double sv_max = r > 0 ? sv[0] : 0.0;
  int rank = 0;
  for (int i = 0; i < r; ++i)
    if (sv[i] > opts.rank_threshold * sv_max) ++rank;
  result.rank = rank;
  result.nullity = n - rank;
  const double kept_min = rank > 0 ? sv[rank - 1] : 0.0;
  const double discarded_max = rank < r ? sv[rank] : 0.0;
  result.gap = discarded_max > 0.0 ? kept_min / discarded_max
                                   : std::numeric_limits<double>::infinity();
  return result;
}

int numerical_nullity(const ImplicitBody& body, const Solution& solution,
                      const SolveOptions& opts) {
  return chart_nullity(body, solution.config, opts, JacobianMethod::analytic).nullity;
}

SweepResult sweep_family(const ImplicitBody& body, const Solution& solution, int steps,
                         double step_size, const SolveOptions& opts) {
  if (steps < 1) throw InputError("sweep_family: steps must be >= 1");
  if (!(step_size > 0.0)) throw InputError("sweep_family: step_size must be positive");
  if (numerical_nullity(body, solution, opts) < 1)
    throw PreconditionError("sweep_family: solution has no null direction to follow");

  SolveOptions resolved = opts;
  resolved.lambda_min = opts.resolve_lambda_min(body);

  SweepResult result;
  CrossConfig current = solution.config;
  Vec prev_dir;

  for (int k = 0; k < steps; ++k) {
    const Mat jac = residual_jacobian(body, current, ResidualForm::levelset);
    Eigen::JacobiSVD<Mat> svd(jac, Eigen::ComputeFullV);
    Vec dir = svd.matrixV().col(jac.cols() - 1);
    if (prev_dir.size() > 0 && dir.dot(prev_dir) < 0.0) dir = -dir;

    std::optional<Solution> corrected;
    try {
      const CrossConfig predicted =
          apply_chart_step(current, step_size * dir, ResidualForm::levelset);
      const SolveOutcome outcome = gauss_newton(body, predicted, ResidualForm::levelset, resolved);
      if (outcome.status == SolveStatus::converged) corrected = outcome.solution;
    } catch (const InputError&) {
      corrected.reset();
    }
    if (!corrected) {
      result.truncated = true;
      break;
    }
    corrected->provenance = Provenance::sweep;
    current = corrected->config;
    prev_dir = dir;

    bool distinct = true;
    for (const Solution& kept : result.solutions) {
      if (vertex_hausdorff(kept.config, corrected->config) <= step_size / 10.0) {
        distinct = false;
        break;
      }
    }
    if (distinct) result.solutions.push_back(std::move(*corrected));
  }
  return result;
}

}  // namespace crossfit
