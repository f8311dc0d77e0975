#include <benchmark/benchmark.h>

#include <map>
#include <memory>
#include <random>

#include "rbfpu/sparse_path.hpp"
#include "rbfpu/system.hpp"
#include "rbfpu/trust_region.hpp"

using namespace rbfpu;

namespace {

std::shared_ptr<const Discretization> grid(double h) {
  static std::map<double, std::shared_ptr<const Discretization>> cache;
  auto& d = cache[h];
  if (!d) {
    DiscretizationParams p;
    p.h = h;
    d = std::make_shared<const Discretization>(p);
  }
  return d;
}

Eigen::VectorXd random_state(Eigen::Index n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) y(i) = u(rng);
  return y;
}

}  // namespace

static void BM_LocalInterpolant(benchmark::State& state) {
  const double h = 0.05;
  std::vector<Point2> nodes;
  for (double x = 0.0; x <= 0.5; x += h) {
    for (double y = 0.0; y <= 0.5; y += h) {
      if ((x - 0.25) * (x - 0.25) + (y - 0.25) * (y - 0.25) < 0.0625) nodes.push_back({x, y});
    }
  }
  for (auto _ : state) {
    LocalInterpolant li(nodes, KernelParams{});
    benchmark::DoNotOptimize(li.rcond());
  }
  state.counters["nodes"] = static_cast<double>(nodes.size());
}
BENCHMARK(BM_LocalInterpolant)->Unit(benchmark::kMicrosecond);

static void BM_Discretization(benchmark::State& state) {
  DiscretizationParams p;
  p.h = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state) {
    Discretization d(p);
    benchmark::DoNotOptimize(d.n());
  }
}
BENCHMARK(BM_Discretization)->Arg(5)->Arg(10)->Unit(benchmark::kMillisecond);

static void BM_Residual(benchmark::State& state) {
  const auto d = grid(1.0 / static_cast<double>(state.range(0)));
  const ReducedSystem sys(d);
  const Eigen::VectorXd y = random_state(sys.dim(), 1);
  for (auto _ : state) benchmark::DoNotOptimize(sys.residual(y, 20.0).data());
}
BENCHMARK(BM_Residual)->Arg(5)->Arg(10)->Unit(benchmark::kMillisecond);

static void BM_ReducedJacobian(benchmark::State& state) {
  const auto d = grid(1.0 / static_cast<double>(state.range(0)));
  const ReducedSystem sys(d);
  const Eigen::VectorXd y = random_state(sys.dim(), 2);
  for (auto _ : state) benchmark::DoNotOptimize(sys.jacobian(y, 20.0).data());
}
BENCHMARK(BM_ReducedJacobian)->Arg(5)->Arg(10)->Unit(benchmark::kMillisecond);

static void BM_SparseJacobian(benchmark::State& state) {
  const auto d = grid(1.0 / static_cast<double>(state.range(0)));
  const SparseSystem sys(d);
  const Eigen::VectorXd x = random_state(sys.dim(), 3);
  for (auto _ : state) {
    const SparseMatrix j = sys.jacobian(x, 20.0);
    benchmark::DoNotOptimize(j.nonZeros());
  }
}
BENCHMARK(BM_SparseJacobian)->Arg(5)->Arg(10)->Unit(benchmark::kMillisecond);

static void BM_DoglegDense(benchmark::State& state) {
  const auto d = grid(1.0 / static_cast<double>(state.range(0)));
  const ReducedSystem sys(d);
  const Eigen::VectorXd y = random_state(sys.dim(), 4);
  const Eigen::MatrixXd j = sys.jacobian(y, 20.0);
  const Eigen::VectorXd e = sys.residual(y, 20.0);
  for (auto _ : state) {
    const DoglegStep s = dogleg_step(j, e, 1.0);
    benchmark::DoNotOptimize(s.step.data());
  }
}
BENCHMARK(BM_DoglegDense)->Arg(5)->Arg(10)->Unit(benchmark::kMillisecond);

static void BM_SparseFactorization(benchmark::State& state) {
  const auto d = grid(1.0 / static_cast<double>(state.range(0)));
  const SparseSystem sys(d);
  const SparseMatrix j = sys.jacobian(random_state(sys.dim(), 5), 20.0);
  for (auto _ : state) {
    SparseLinearization lin(j);
    benchmark::DoNotOptimize(&lin);
  }
}
BENCHMARK(BM_SparseFactorization)->Arg(5)->Arg(10)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
