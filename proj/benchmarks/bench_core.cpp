#include <benchmark/benchmark.h>

#include <crossfit/bodies.hpp>
#include <crossfit/configuration.hpp>
#include <crossfit/oracle.hpp>
#include <crossfit/solver.hpp>

using namespace crossfit;

namespace {

ImplicitBody smoothed_cube() {
  std::vector<Halfspace> faces;
  for (int i = 0; i < 3; ++i)
    for (int s = -1; s <= 1; s += 2) {
      Vec n = Vec::Zero(3);
      n[i] = s;
      faces.push_back({n, 1.0});
    }
  return ImplicitBody::make_smoothed_polytope(faces, 20.0);
}

void BM_evaluate_ellipsoid(benchmark::State& state) {
  const ImplicitBody body = ImplicitBody::make_ellipsoid((Vec(3) << 1, 1, 2).finished());
  const Vec x = (Vec(3) << 0.3, -0.2, 0.9).finished();
  for (auto _ : state) benchmark::DoNotOptimize(body.evaluate(x));
}
BENCHMARK(BM_evaluate_ellipsoid);

void BM_evaluate_smoothed_cube(benchmark::State& state) {
  const ImplicitBody body = smoothed_cube();
  const Vec x = (Vec(3) << 0.3, -0.2, 0.9).finished();
  for (auto _ : state) benchmark::DoNotOptimize(body.evaluate(x));
}
BENCHMARK(BM_evaluate_smoothed_cube);

void BM_gradient_smoothed_cube(benchmark::State& state) {
  const ImplicitBody body = smoothed_cube();
  const Vec x = (Vec(3) << 0.3, -0.2, 0.9).finished();
  for (auto _ : state) benchmark::DoNotOptimize(body.gradient(x));
}
BENCHMARK(BM_gradient_smoothed_cube);

void BM_ray_intersect(benchmark::State& state) {
  const ImplicitBody body = smoothed_cube();
  const Vec origin = Vec::Zero(3);
  const Vec dir = (Vec(3) << 1, 1, 1).finished().normalized();
  for (auto _ : state) benchmark::DoNotOptimize(body.ray_intersect(origin, dir));
}
BENCHMARK(BM_ray_intersect);

void BM_residual_levelset(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  Vec axes = Vec::Ones(d);
  axes[d - 1] = 2.0;
  const ImplicitBody body = ImplicitBody::make_ellipsoid(axes);
  const CrossConfig config(Vec::Zero(d), 1.0, random_rotation(7, d), BaseFrame::standard(d));
  for (auto _ : state) benchmark::DoNotOptimize(residual_levelset(body, config));
}
BENCHMARK(BM_residual_levelset)->Arg(3)->Arg(5)->Arg(7);

void BM_residual_jacobian(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  Vec axes = Vec::Ones(d);
  axes[d - 1] = 2.0;
  const ImplicitBody body = ImplicitBody::make_ellipsoid(axes);
  const CrossConfig config(Vec::Zero(d), 1.0, random_rotation(7, d), BaseFrame::standard(d));
  for (auto _ : state)
    benchmark::DoNotOptimize(residual_jacobian(body, config, ResidualForm::levelset));
}
BENCHMARK(BM_residual_jacobian)->Arg(3)->Arg(5)->Arg(7);

void BM_retract(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const Rotation rho = random_rotation(3, d);
  Vec omega = Vec::Constant(tangent_dim(d), 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(retract(rho, omega));
}
BENCHMARK(BM_retract)->Arg(3)->Arg(7);

void BM_gauss_newton_ellipsoid(benchmark::State& state) {
  const ImplicitBody body = ImplicitBody::make_ellipsoid((Vec(3) << 1, 1, 2).finished());
  const CrossConfig start(Vec::Zero(3), 1.1, random_rotation(11, 3), BaseFrame::standard(3));
  SolveOptions opts;
  for (auto _ : state)
    benchmark::DoNotOptimize(gauss_newton(body, start, ResidualForm::levelset, opts));
}
BENCHMARK(BM_gauss_newton_ellipsoid);

void BM_brute_force_coarse(benchmark::State& state) {
  const ImplicitBody body = ImplicitBody::make_ellipsoid((Vec(3) << 1, 1, 2).finished());
  GridSpec spec;
  spec.euler_resolution = 8;
  spec.center_resolution = 3;
  spec.scale_resolution = 5;
  for (auto _ : state)
    benchmark::DoNotOptimize(brute_force_search(body, BaseFrame::standard(3), spec));
}
BENCHMARK(BM_brute_force_coarse);

}  // namespace

BENCHMARK_MAIN();
