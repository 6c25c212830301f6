#include "crossfit/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "parallel.hpp"

namespace crossfit {

namespace {

struct GridCell {
  double value;
  int rot, center, scale;
};

Mat euler_zyz(double alpha, double beta, double gamma) {
  const double ca = std::cos(alpha), sa = std::sin(alpha);
  const double cb = std::cos(beta), sb = std::sin(beta);
  const double cg = std::cos(gamma), sg = std::sin(gamma);
  Mat rz1(3, 3), ry(3, 3), rz2(3, 3);
  rz1 << ca, -sa, 0, sa, ca, 0, 0, 0, 1;
  ry << cb, 0, sb, 0, 1, 0, -sb, 0, cb;
  rz2 << cg, -sg, 0, sg, cg, 0, 0, 0, 1;
  return rz1 * ry * rz2;
}

}  // namespace

std::vector<CrossConfig> brute_force_search(const ImplicitBody& body, const BaseFrame& frame,
                                            const GridSpec& spec) {
  if (body.dim() != 3)
    throw UnsupportedDimensionError("brute_force_search: only dimension 3 is supported");
  if (frame.dim() != 3) throw InputError("brute_force_search: frame dimension mismatch");
  if (spec.euler_resolution < 2 || spec.center_resolution < 2 || spec.scale_resolution < 2)
    throw InputError("brute_force_search: all resolutions must be >= 2");
  if (!(spec.coarse_tol > 0.0)) throw InputError("brute_force_search: coarse_tol must be positive");

  const int na = spec.euler_resolution;
  const int nb = spec.euler_resolution / 2 + 1;
  const int nc = spec.center_resolution;
  const int ns = spec.scale_resolution;
  const double total = static_cast<double>(na) * nb * na * nc * nc * nc * ns;
  if (total >= 1e8) throw BudgetError("brute_force_search: grid exceeds the 1e8 cell budget");

  const double inradius = body.inradius_estimate();
  const double circumradius = body.circumradius_estimate();
  const Vec& interior = body.interior_point();

  std::vector<double> alphas(na), betas(nb), gammas(na);
  for (int i = 0; i < na; ++i) alphas[i] = 2.0 * std::numbers::pi * i / na;
  for (int i = 0; i < nb; ++i) betas[i] = std::numbers::pi * i / (nb - 1);
  gammas = alphas;

  const double center_span = 0.3 * inradius;
  std::vector<double> center_offsets(nc);
  for (int i = 0; i < nc; ++i)
    center_offsets[i] = -center_span + 2.0 * center_span * i / (nc - 1);
  std::vector<double> scales(ns);
  for (int i = 0; i < ns; ++i)
    scales[i] = inradius * (0.2 + 1.8 * i / (ns - 1));

  const Mat frame_matrix = frame.matrix();
  const int n_rot = na * nb * na;
  const int n_center = nc * nc * nc;

  std::vector<std::vector<GridCell>> per_rotation(n_rot);
  detail::parallel_for(static_cast<std::size_t>(n_rot), [&](std::size_t rot_idx) {
    const int ia = static_cast<int>(rot_idx) / (nb * na);
    const int ib = (static_cast<int>(rot_idx) / na) % nb;
    const int ig = static_cast<int>(rot_idx) % na;
    const Mat rot = euler_zyz(alphas[ia], betas[ib], gammas[ig]);
    Mat axes = rot * frame_matrix;
    for (int i = 0; i < 3; ++i) axes.col(i).normalize();

    std::vector<GridCell>& cells = per_rotation[rot_idx];
    Vec center(3), v(3);
    for (int ci = 0; ci < n_center; ++ci) {
      center[0] = interior[0] + center_offsets[ci / (nc * nc)];
      center[1] = interior[1] + center_offsets[(ci / nc) % nc];
      center[2] = interior[2] + center_offsets[ci % nc];
      for (int si = 0; si < ns; ++si) {
        const double lambda = scales[si];
        double worst = 0.0;
        for (int i = 0; i < 3 && worst < spec.coarse_tol; ++i) {
          v.noalias() = center + lambda * axes.col(i);
          worst = std::max(worst, std::abs(body.evaluate(v)));
          if (worst >= spec.coarse_tol) break;
          v.noalias() = center - lambda * axes.col(i);
          worst = std::max(worst, std::abs(body.evaluate(v)));
        }
        if (worst < spec.coarse_tol)
          cells.push_back(GridCell{worst, static_cast<int>(rot_idx), ci, si});
      }
    }
  });

  std::vector<GridCell> below;
  for (const std::vector<GridCell>& cells : per_rotation)
    below.insert(below.end(), cells.begin(), cells.end());
  std::sort(below.begin(), below.end(), [](const GridCell& a, const GridCell& b) {
    if (a.value != b.value) return a.value < b.value;
    if (a.rot != b.rot) return a.rot < b.rot;
    if (a.center != b.center) return a.center < b.center;
    return a.scale < b.scale;
  });

  // Non-maximum suppression: keep ascending-defect representatives farther than
  // twice the grid spacing (in vertex displacement terms) from everything kept.
  const double h_center = 2.0 * center_span / (nc - 1);
  const double h_scale = 1.8 * inradius / (ns - 1);
  const double h_euler = 2.0 * std::numbers::pi / na;
  const double suppress_radius =
      2.0 * (std::sqrt(3.0) * h_center + h_scale + circumradius * h_euler);
  constexpr std::size_t kMaxCandidates = 512;

  auto build_config = [&](const GridCell& cell) {
    const int ia = cell.rot / (nb * na);
    const int ib = (cell.rot / na) % nb;
    const int ig = cell.rot % na;
    Vec center(3);
    center << interior[0] + center_offsets[cell.center / (nc * nc)],
        interior[1] + center_offsets[(cell.center / nc) % nc],
        interior[2] + center_offsets[cell.center % nc];
    return CrossConfig(center, scales[cell.scale],
                       Rotation(euler_zyz(alphas[ia], betas[ib], gammas[ig])), frame);
  };

  std::vector<CrossConfig> kept;
  for (const GridCell& cell : below) {
    if (kept.size() >= kMaxCandidates) break;
    CrossConfig candidate = build_config(cell);
    bool suppressed = false;
    for (const CrossConfig& existing : kept) {
      if (vertex_hausdorff(existing, candidate) <= suppress_radius) {
        suppressed = true;
        break;
      }
    }
    if (!suppressed) kept.push_back(std::move(candidate));
  }
  return kept;
}

RefineResult refine_candidates(const ImplicitBody& body, const std::vector<CrossConfig>& candidates,
                               const SolveOptions& opts) {
  SolveOptions resolved = opts;
  resolved.lambda_min = opts.resolve_lambda_min(body);

  RefineResult result;
  result.attempted = static_cast<int>(candidates.size());
  std::vector<std::optional<Solution>> refined(candidates.size());
  detail::parallel_for(candidates.size(), [&](std::size_t i) {
    const SolveOutcome outcome =
        gauss_newton(body, candidates[i], ResidualForm::levelset, resolved);
    if (outcome.status == SolveStatus::converged) refined[i] = outcome.solution;
  });

  for (std::optional<Solution>& sol : refined) {
    if (!sol) {
      ++result.dropped;
      continue;
    }
    sol->provenance = Provenance::oracle_refined;
    bool duplicate = false;
    for (const Solution& kept : result.solutions) {
      if (vertex_hausdorff(kept.config, sol->config) <= 1e-6) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) result.solutions.push_back(std::move(*sol));
  }
  return result;
}

}  // namespace crossfit
