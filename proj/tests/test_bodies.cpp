#include <doctest.h>

#include <cmath>
#include <random>

#include <crossfit/bodies.hpp>

#include "support/oracles.hpp"

using namespace crossfit;
using namespace crossfit::testing;

namespace {

Vec vec3(double x, double y, double z) { return (Vec(3) << x, y, z).finished(); }

// Random point in a shell around the surface, away from any radial singularity.
Vec surface_shell_sample(const ImplicitBody& body, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> radial(0.5, 1.1);
  Vec dir(body.dim());
  for (int i = 0; i < body.dim(); ++i) dir[i] = normal(rng);
  dir.normalize();
  const double a = body.ray_intersect(body.interior_point(), dir);
  return body.interior_point() + radial(rng) * a * dir;
}

}  // namespace

TEST_CASE("evaluate matches the analytic level-set values") {
  const ImplicitBody ball = ImplicitBody::make_ball(3);
  CHECK(ball.evaluate(Vec::Zero(3)) == doctest::Approx(-1.0).epsilon(0.0));

  const ImplicitBody ell = ImplicitBody::make_ellipsoid(vec3(1, 1, 2));
  CHECK(ell.evaluate(vec3(0, 0, 2)) == doctest::Approx(0.0));
  CHECK(ell.evaluate(vec3(1, 0, 0)) == doctest::Approx(0.0));
  CHECK(ell.evaluate(vec3(0, 0, 1)) == doctest::Approx(-0.75));

  CHECK_THROWS_AS(ball.evaluate(Vec::Zero(2)), InputError);
}

TEST_CASE("gradient matches the analytic expressions") {
  const ImplicitBody ball = ImplicitBody::make_ball(3);
  CHECK((ball.gradient(vec3(1, 0, 0)) - vec3(2, 0, 0)).norm() == doctest::Approx(0.0));

  const ImplicitBody ell = ImplicitBody::make_ellipsoid(vec3(1, 1, 2));
  CHECK((ell.gradient(vec3(0, 0, 2)) - vec3(0, 0, 1)).norm() == doctest::Approx(0.0));

  CHECK_THROWS_AS(ell.gradient(Vec::Zero(4)), InputError);
}

TEST_CASE("gradient agrees with central finite differences on every kind") {
  std::mt19937_64 rng(42);
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const ImplicitBody body = random_body(seed, 3);
    for (int k = 0; k < 4; ++k) {
      const Vec x = surface_shell_sample(body, rng);
      const Vec g = body.gradient(x);
      const Vec fd = fd_gradient(body, x);
      const double rel = (g - fd).norm() / std::max(1e-12, fd.norm());
      CHECK(rel < 1e-5);
    }
  }
}

TEST_CASE("ray_intersect returns exact chords on canonical bodies") {
  const ImplicitBody ball = ImplicitBody::make_ball(3);
  CHECK(ball.ray_intersect(Vec::Zero(3), vec3(1, 0, 0)) == doctest::Approx(1.0));

  const ImplicitBody ell = ImplicitBody::make_ellipsoid(vec3(1, 1, 2));
  CHECK(ell.ray_intersect(Vec::Zero(3), vec3(0, 0, 1)) == doctest::Approx(2.0));

  const Vec origin = vec3(0.5, 0, 0);
  CHECK(ball.ray_intersect(origin, vec3(1, 0, 0)) == doctest::Approx(0.5));
  CHECK(ball.ray_intersect(origin, vec3(-1, 0, 0)) == doctest::Approx(1.5));
}

TEST_CASE("ray_intersect validates its preconditions") {
  const ImplicitBody ball = ImplicitBody::make_ball(3);
  CHECK_THROWS_AS(ball.ray_intersect(vec3(2, 0, 0), vec3(1, 0, 0)), PreconditionError);
  CHECK_THROWS_AS(ball.ray_intersect(Vec::Zero(3), vec3(1, 1, 0)), InputError);
}

TEST_CASE("ray_intersect agrees with a scalar bisection oracle on a perturbed sphere") {
  RadialTerm cubic;
  cubic.powers = {0, 0, 3};
  cubic.coeff = 0.2;
  const ImplicitBody body = ImplicitBody::make_perturbed_sphere(3, {cubic});

  const double a = body.ray_intersect(Vec::Zero(3), vec3(0, 0, 1));
  CHECK(std::abs(a - bisect_ray(body, Vec::Zero(3), vec3(0, 0, 1))) < 1e-10);
  CHECK(a == doctest::Approx(1.2).epsilon(1e-10));

  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int k = 0; k < 20; ++k) {
    Vec dir(3);
    for (int i = 0; i < 3; ++i) dir[i] = normal(rng);
    dir.normalize();
    const double got = body.ray_intersect(Vec::Zero(3), dir);
    CHECK(std::abs(got - bisect_ray(body, Vec::Zero(3), dir)) < 1e-10);
  }
}

TEST_CASE("ray residual stays below 1e-10 for random interior rays on every kind") {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> inside(0.0, 0.5);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const ImplicitBody body = random_body(seed, 3);
    const double inradius = body.inradius_estimate();
    for (int k = 0; k < 100; ++k) {
      Vec jitter(3), dir(3);
      for (int i = 0; i < 3; ++i) {
        jitter[i] = normal(rng);
        dir[i] = normal(rng);
      }
      jitter.normalize();
      dir.normalize();
      const Vec origin = body.interior_point() + inside(rng) * inradius * jitter;
      if (!(body.evaluate(origin) < 0.0)) continue;
      const double a = body.ray_intersect(origin, dir);
      CHECK(std::abs(body.evaluate(origin + a * dir)) <= 1e-10);
    }
  }
}

TEST_CASE("convex chords: both directions give positive roots completing the chord") {
  const ImplicitBody ell = ImplicitBody::make_ellipsoid(vec3(1, 1, 2));
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    Vec dir(3), offset(3);
    for (int i = 0; i < 3; ++i) {
      dir[i] = normal(rng);
      offset[i] = normal(rng);
    }
    dir.normalize();
    offset *= 0.05;
    const double fwd = ell.ray_intersect(offset, dir);
    const double bwd = ell.ray_intersect(offset, -dir);
    CHECK(fwd > 0.0);
    CHECK(bwd > 0.0);
    // Endpoints straddle the origin-centered chord.
    CHECK(std::abs(ell.evaluate(offset + fwd * dir)) <= 1e-10);
    CHECK(std::abs(ell.evaluate(offset - bwd * dir)) <= 1e-10);
  }
}

TEST_CASE("superellipsoid surface points and convexity flags") {
  const ImplicitBody se = ImplicitBody::make_superellipsoid(vec3(1, 1, 1), 4);
  CHECK(se.evaluate(vec3(1, 0, 0)) == doctest::Approx(0.0));
  CHECK(se.convex());
  CHECK(se.centrally_symmetric());

  RadialTerm t;
  t.powers = {1, 1, 1};
  t.coeff = 0.1;
  const ImplicitBody ps = ImplicitBody::make_perturbed_sphere(3, {t});
  CHECK_FALSE(ps.convex());
  CHECK_FALSE(ps.centrally_symmetric());  // odd total degree
}

TEST_CASE("homotopy blend endpoints evaluate identically to their bodies") {
  const ImplicitBody ball = ImplicitBody::make_ball(3);
  const ImplicitBody ell = ImplicitBody::make_ellipsoid(vec3(1, 1, 2));
  const HomotopyFamily family(ball, ell);

  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal(0.0, 1.0);
  const ImplicitBody at0 = family.body_at(0.0);
  const ImplicitBody at1 = family.body_at(1.0);
  for (int k = 0; k < 10; ++k) {
    Vec x(3);
    for (int i = 0; i < 3; ++i) x[i] = normal(rng);
    CHECK(at0.evaluate(x) == ball.evaluate(x));
    CHECK(at1.evaluate(x) == ell.evaluate(x));
  }
}

TEST_CASE("blend arithmetic is the exact affine combination") {
  const ImplicitBody ball = ImplicitBody::make_ball(3);
  const ImplicitBody ell = ImplicitBody::make_ellipsoid(vec3(1, 1, 2));
  const HomotopyFamily family(ball, ell);

  const ImplicitBody mid = family.body_at(0.5);
  CHECK(mid.evaluate(vec3(0, 0, 1)) == doctest::Approx(-0.375).epsilon(0.0));

  std::mt19937_64 rng(13);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> ts(0.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    const double t = ts(rng);
    Vec x(3);
    for (int i = 0; i < 3; ++i) x[i] = normal(rng);
    const ImplicitBody bt = family.body_at(t);
    CHECK(bt.evaluate(x) == (1.0 - t) * ball.evaluate(x) + t * ell.evaluate(x));
  }

  CHECK_THROWS_AS(family.body_at(1.5), InputError);
  CHECK_THROWS_AS(family.body_at(-0.1), InputError);
}

TEST_CASE("blend re-derives the interior point when the start point drifts outside") {
  // Box shifted to [1,3] x [-1,1]^2; the ball's center leaves the blend for large t.
  std::vector<Halfspace> faces;
  for (int i = 0; i < 3; ++i)
    for (int s = -1; s <= 1; s += 2) {
      Vec n = Vec::Zero(3);
      n[i] = s;
      double offset = 1.0;
      if (i == 0) offset = s > 0 ? 3.0 : -1.0;
      faces.push_back({n, offset});
    }
  const ImplicitBody box = ImplicitBody::make_smoothed_polytope(faces, 25.0);
  CHECK(box.evaluate(box.interior_point()) < 0.0);
  CHECK(box.interior_point()[0] > 0.5);  // found by descent, origin is outside

  const HomotopyFamily family(ImplicitBody::make_ball(3), box);
  const ImplicitBody late = family.body_at(0.9);
  CHECK(late.evaluate(late.interior_point()) < 0.0);
  CHECK(late.interior_point().norm() > 1e-3);
}

TEST_CASE("parse_body accepts the canonical documents") {
  const ImplicitBody ball = parse_body_text(R"({"kind":"ball","dim":3,"radius":1})");
  CHECK(ball.kind() == BodyKind::ball);
  CHECK(ball.dim() == 3);
  CHECK(ball.evaluate(Vec::Zero(3)) == doctest::Approx(-1.0));

  const ImplicitBody ell = parse_body_text(R"({"kind":"ellipsoid","semi_axes":[1,1,2]})");
  CHECK(ell.kind() == BodyKind::ellipsoid);
  CHECK(ell.dim() == 3);
  CHECK(ell.evaluate(vec3(0, 0, 2)) == doctest::Approx(0.0));
}

TEST_CASE("parse_body rejects malformed documents with field paths") {
  CHECK_THROWS_AS(parse_body_text(R"({"kind":"superellipsoid","semi_axes":[1,1,1],"exponent":3})"),
                  ParseError);
  CHECK_THROWS_AS(parse_body_text(R"({"kind":"ball","dim":0,"radius":1})"), ParseError);
  CHECK_THROWS_AS(parse_body_text(R"({"kind":"torus","dim":3})"), ParseError);
  CHECK_THROWS_AS(parse_body_text(R"({"kind":"ball","dim":3,"color":"red"})"), ParseError);
  CHECK_THROWS_AS(parse_body_text(R"({"kind":"ellipsoid","semi_axes":[1,-1,2]})"), ParseError);
  CHECK_THROWS_AS(
      parse_body_text(R"({"kind":"smoothed_polytope","halfspaces":[{"normal":[1,0,0],"offset":1}],"sharpness":0})"),
      ParseError);
  CHECK_THROWS_AS(
      parse_body_text(R"({"kind":"perturbed_sphere","coeffs":[{"monomial":[0,0,2],"c":0.6}]})"),
      ParseError);
  CHECK_THROWS_AS(parse_body_text(R"({"kind":"ellipsoid","semi_axes":[1,1,2],"dim":4})"),
                  ParseError);
  CHECK_THROWS_AS(parse_body_text("not json"), ParseError);

  try {
    parse_body_text(R"({"kind":"superellipsoid","semi_axes":[1,1,1],"exponent":3})");
  } catch (const ParseError& e) {
    CHECK(e.path() == "exponent");
  }
}

TEST_CASE("body JSON round-trips through parse_body") {
  std::vector<std::string> docs = {
      R"({"kind":"ball","dim":3,"radius":1.5})",
      R"({"kind":"ellipsoid","semi_axes":[1,1.25,2]})",
      R"({"kind":"superellipsoid","semi_axes":[1,1,1],"exponent":4})",
      R"({"kind":"perturbed_sphere","coeffs":[{"monomial":[0,0,3],"c":0.2}]})"};
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (const std::string& text : docs) {
    const ImplicitBody body = parse_body_text(text);
    const ImplicitBody again = parse_body(body_to_json(body));
    for (int k = 0; k < 10; ++k) {
      Vec x(body.dim());
      for (int i = 0; i < body.dim(); ++i) x[i] = normal(rng);
      CHECK(body.evaluate(x) == again.evaluate(x));
    }
  }
}

TEST_CASE("radius estimates bracket the body") {
  const ImplicitBody ell = ImplicitBody::make_ellipsoid(vec3(1, 1, 2));
  CHECK(ell.inradius_estimate() == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(ell.circumradius_estimate() <= 2.0 + 1e-9);
  CHECK(ell.circumradius_estimate() > 1.5);
}
