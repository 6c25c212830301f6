#include "crossfit/verify.hpp"

#include <cmath>

namespace crossfit {

std::string to_string(Guarantee g) {
  switch (g) {
    case Guarantee::odd_prime_power: return "odd_prime_power";
    case Guarantee::centrally_symmetric_any_d: return "centrally_symmetric_any_d";
    case Guarantee::none: return "none";
  }
  return "unknown";
}

VerificationReport check_solution(const ImplicitBody& body, const Solution& solution, double tol,
                                  bool require_dimension) {
  const CrossConfig& config = solution.config;
  if (body.dim() != config.dim()) throw InputError("check_solution: dimension mismatch");
  const int d = config.dim();

  VerificationReport report;
  for (const Vec& v : vertices(config))
    report.max_surface_defect = std::max(report.max_surface_defect, std::abs(body.evaluate(v)));

  const Mat& e = config.frame.matrix();
  report.frame_regular = config.frame.regular();
  report.frame_orthonormality_defect =
      report.frame_regular
          ? (e.transpose() * e - Mat::Identity(d, d)).cwiseAbs().maxCoeff()
          : 0.0;

  const Mat& rho = config.rotation.matrix();
  report.rotation_defect = (rho.transpose() * rho - Mat::Identity(d, d)).cwiseAbs().maxCoeff();

  SolveOptions opts;
  report.nullity = chart_nullity(body, config, opts, JacobianMethod::finite_difference).nullity;
  report.expected_nullity = (d - 1) * (d - 2) / 2;
  report.guarantee = classify_guarantee(d, body);

  report.passed = report.max_surface_defect < tol && report.rotation_defect < tol &&
                  (!report.frame_regular || report.frame_orthonormality_defect < tol) &&
                  (!require_dimension || report.nullity >= report.expected_nullity);
  return report;
}

bool check_equivariance(const ImplicitBody& body, const CrossConfig& config, int trials,
                        std::uint64_t seed) {
  if (!config.frame.matrix().isIdentity(1e-15))
    throw PreconditionError("check_equivariance: requires the standard base frame");
  const int d = config.dim();
  const Vec base = residual_levelset(body, config).values;
  for (int trial = 0; trial < trials; ++trial) {
    const SignedPermutation sigma = SignedPermutation::random(seed + trial, d);
    const Rotation permuted(config.rotation.matrix() * sigma.matrix());
    const CrossConfig moved(config.center, config.scale, permuted, config.frame);
    const Vec values = residual_levelset(body, moved).values;
    const std::vector<int> map = sigma.induced_vertex_permutation();
    for (int k = 0; k < 2 * d; ++k)
      if (std::abs(values[k] - base[map[k]]) > 1e-12) return false;
  }
  return true;
}

bool is_odd_prime_power(std::uint64_t d) {
  if (d < 3) return false;
  if (d % 2 == 0) return false;
  // Smallest prime factor, then check d is a pure power of it.
  std::uint64_t p = 0;
  for (std::uint64_t f = 3; f * f <= d; f += 2) {
    if (d % f == 0) {
      p = f;
      break;
    }
  }
  if (p == 0) return true;  // d itself is an odd prime
  while (d % p == 0) d /= p;
  return d == 1;
}

Guarantee classify_guarantee(int d, const ImplicitBody& body) {
  if (d < 2) throw InputError("classify_guarantee: dimension must be >= 2");
  if (is_odd_prime_power(static_cast<std::uint64_t>(d))) return Guarantee::odd_prime_power;
  if (body.centrally_symmetric()) return Guarantee::centrally_symmetric_any_d;
  return Guarantee::none;
}

}  // namespace crossfit
