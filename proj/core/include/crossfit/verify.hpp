#pragma once

#include <cstdint>
#include <string>

#include "crossfit/solver.hpp"

namespace crossfit {

enum class Guarantee { odd_prime_power, centrally_symmetric_any_d, none };

std::string to_string(Guarantee g);

struct VerificationReport {
  double max_surface_defect = 0.0;          // max |f(vertex)|
  double frame_orthonormality_defect = 0.0; // ||E^T E - I||_max, regular frames only
  bool frame_regular = true;
  double rotation_defect = 0.0;             // ||rho^T rho - I||_max
  int nullity = 0;
  int expected_nullity = 0;                 // (d-1)(d-2)/2
  Guarantee guarantee = Guarantee::none;
  bool passed = false;
};

/// Audits a solution against the body: on-surface defect, frame/rotation regularity,
/// and the family-dimension bound. The nullity is recomputed from a fresh
/// finite-difference Jacobian, independent of the solver's analytic path.
VerificationReport check_solution(const ImplicitBody& body, const Solution& solution, double tol,
                                  bool require_dimension = true);

/// Checks the residual-permutation identity for `trials` random signed permutations
/// with determinant +1: permuting the rotated frame permutes the level-set residual
/// entries accordingly, within 1e-12. Requires the standard base frame.
bool check_equivariance(const ImplicitBody& body, const CrossConfig& config, int trials,
                        std::uint64_t seed = 0);

/// d = p^k for an odd prime p.
bool is_odd_prime_power(std::uint64_t d);

/// Existence guarantee for inscribing a regular crosspolytope in dimension d:
/// odd prime powers always; centrally symmetric bodies in every dimension;
/// otherwise no guarantee (the solver still searches).
Guarantee classify_guarantee(int d, const ImplicitBody& body);

}  // namespace crossfit
