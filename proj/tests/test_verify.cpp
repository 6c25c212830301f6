#include <doctest.h>

#include <cmath>

#include <crossfit/verify.hpp>

#include "support/oracles.hpp"

using namespace crossfit;
using namespace crossfit::testing;

namespace {

Vec vec3(double x, double y, double z) { return (Vec(3) << x, y, z).finished(); }

}  // namespace

TEST_CASE("check_solution passes exact witnesses and fails corrupted ones") {
  const ImplicitBody ball = ImplicitBody::make_ball(3);
  const Solution exact{CrossConfig(Vec::Zero(3), 1.0, Rotation::identity(3),
                                   BaseFrame::standard(3)),
                       0.0, 3, 0, Provenance::direct};
  const VerificationReport good = check_solution(ball, exact, 1e-9);
  CHECK(good.passed);
  CHECK(good.max_surface_defect < 1e-14);
  CHECK(good.frame_orthonormality_defect < 1e-14);
  CHECK(good.rotation_defect < 1e-14);
  CHECK(good.nullity >= good.expected_nullity);
  CHECK(good.guarantee == Guarantee::odd_prime_power);

  const ImplicitBody ell = ImplicitBody::make_ellipsoid(vec3(1, 1, 2));
  const Solution family{CrossConfig(Vec::Zero(3), 2.0 / std::sqrt(3.0), rho_m(),
                                    BaseFrame::standard(3)),
                        0.0, 1, 0, Provenance::direct};
  const VerificationReport fam = check_solution(ell, family, 1e-9);
  CHECK(fam.passed);
  CHECK(fam.nullity == 1);
  CHECK(fam.expected_nullity == 1);

  Solution corrupted = family;
  corrupted.config.scale += 0.01;
  const VerificationReport bad = check_solution(ell, corrupted, 1e-9);
  CHECK_FALSE(bad.passed);
  CHECK(bad.max_surface_defect > 1e-3);
}

TEST_CASE("inscribed non-regular frames are reported as inscribed but irregular") {
  // Frame diag(1,1,2) with identity rotation puts vertices (+-1,0,0),(0,+-1,0),(0,0,+-2)
  // exactly on the (1,1,2) ellipsoid: a Theorem-2 style witness that is not regular.
  const ImplicitBody ell = ImplicitBody::make_ellipsoid(vec3(1, 1, 2));
  Mat stretched = Mat::Identity(3, 3);
  stretched(2, 2) = 2.0;
  const Solution sol{CrossConfig(Vec::Zero(3), 1.0, Rotation::identity(3), BaseFrame(stretched)),
                     0.0, 0, 0, Provenance::direct};
  const VerificationReport report = check_solution(ell, sol, 1e-9, false);
  CHECK_FALSE(report.frame_regular);
  CHECK(report.max_surface_defect < 1e-12);
  CHECK(report.passed);
}

TEST_CASE("equivariance holds for the identity and an explicit cycle") {
  const ImplicitBody ell = ImplicitBody::make_ellipsoid(vec3(1, 1, 2));
  const CrossConfig config(Vec::Zero(3), 1.0, Rotation::identity(3), BaseFrame::standard(3));

  SignedPermutation identity{{0, 1, 2}, {1, 1, 1}};
  CHECK(identity.det() == 1);
  const Vec base = residual_levelset(ell, config).values;
  const std::vector<int> idmap = identity.induced_vertex_permutation();
  for (int k = 0; k < 6; ++k) CHECK(idmap[k] == k);

  // Cyclic axis permutation sending e_1 -> e_3, e_2 -> e_1, e_3 -> e_2 (det +1):
  // the residual (0,0,0,0,-3/4,-3/4) must map to (-3/4,-3/4,0,0,0,0).
  SignedPermutation cycle{{2, 0, 1}, {1, 1, 1}};
  CHECK(cycle.det() == 1);
  const CrossConfig moved(config.center, config.scale,
                          Rotation(config.rotation.matrix() * cycle.matrix()), config.frame);
  const Vec rotated = residual_levelset(ell, moved).values;
  CHECK(rotated[0] == doctest::Approx(-0.75));
  CHECK(rotated[1] == doctest::Approx(-0.75));
  for (int k = 2; k < 6; ++k) CHECK(rotated[k] == doctest::Approx(0.0));
  const std::vector<int> map = cycle.induced_vertex_permutation();
  for (int k = 0; k < 6; ++k) CHECK(rotated[k] == base[map[k]]);
}

TEST_CASE("equivariance property holds on random bodies and configurations") {
  std::mt19937_64 rng(19);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const ImplicitBody body = random_body(seed, 3);
    Vec center(3);
    for (int i = 0; i < 3; ++i) center[i] = 0.2 * normal(rng);
    const CrossConfig config(center, 0.3 + 0.5 * std::abs(normal(rng)),
                             random_rotation(seed + 3, 3), BaseFrame::standard(3));
    CHECK(check_equivariance(body, config, 5, seed));
  }

  const ImplicitBody ball = ImplicitBody::make_ball(3);
  Mat skewed = Mat::Identity(3, 3);
  skewed(0, 1) = 0.25;
  const CrossConfig nonstandard(Vec::Zero(3), 1.0, Rotation::identity(3), BaseFrame(skewed));
  CHECK_THROWS_AS(check_equivariance(ball, nonstandard, 1), PreconditionError);
}

TEST_CASE("guarantee classification follows the odd-prime-power hypothesis") {
  const ImplicitBody ball2 = ImplicitBody::make_ball(2);
  const ImplicitBody ball3 = ImplicitBody::make_ball(3);
  CHECK(classify_guarantee(3, ball3) == Guarantee::odd_prime_power);
  CHECK(classify_guarantee(9, ball3) == Guarantee::odd_prime_power);
  CHECK(classify_guarantee(2, ball2) == Guarantee::centrally_symmetric_any_d);

  RadialTerm t;
  t.powers = {1, 1, 1, 0, 0, 0};
  t.coeff = 0.1;
  const ImplicitBody lumpy6 = ImplicitBody::make_perturbed_sphere(6, {t});
  CHECK(classify_guarantee(6, lumpy6) == Guarantee::none);

  // Asymmetric smoothed polytopes get no guarantee outside odd prime powers.
  std::vector<Halfspace> faces;
  Vec n1 = vec3(1, 0, 0), n2 = vec3(-1, 0.1, 0).normalized(), n3 = vec3(0, 1, 0.2).normalized(),
      n4 = vec3(0, -1, 0).eval(), n5 = vec3(0, 0, 1), n6 = vec3(0.1, 0, -1).normalized();
  for (const Vec& n : {n1, n2, n3, n4, n5, n6}) faces.push_back({n, 1.0});
  const ImplicitBody poly = ImplicitBody::make_smoothed_polytope(faces, 15.0);
  CHECK_FALSE(poly.centrally_symmetric());

  // Paired faces make it symmetric again.
  CHECK(smoothed_cube().centrally_symmetric());
  CHECK(classify_guarantee(4, smoothed_cube()) == Guarantee::centrally_symmetric_any_d);
}

TEST_CASE("odd prime power predicate agrees with a sieve oracle up to 10^4") {
  const int limit = 10000;
  // Linear sieve of smallest prime factors: an independent route.
  std::vector<int> spf(limit + 1, 0);
  for (int i = 2; i <= limit; ++i) {
    if (spf[i] == 0)
      for (int j = i; j <= limit; j += i)
        if (spf[j] == 0) spf[j] = i;
  }
  for (int n = 2; n <= limit; ++n) {
    const int p = spf[n];
    bool oracle = p != 2;
    if (oracle) {
      int m = n;
      while (m % p == 0) m /= p;
      oracle = m == 1;
    }
    CHECK(is_odd_prime_power(static_cast<std::uint64_t>(n)) == oracle);
  }
  CHECK_FALSE(is_odd_prime_power(1));
  CHECK_FALSE(is_odd_prime_power(2));
  CHECK_FALSE(is_odd_prime_power(6));
  CHECK(is_odd_prime_power(3));
  CHECK(is_odd_prime_power(27));
  CHECK(is_odd_prime_power(125));
}
