// OpenMP kernels against their serial twins.
#include "nirb/fem.hpp"
#include "nirb/kernels.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace nirb;

namespace {

struct Data {
  Matrix snapshots;
  Matrix modes;
  Matrix coefficients;
  Vector w;
  SpMat gram;
  std::vector<Vector> fields;

  explicit Data(int subdivisions) {
    const Mesh mesh = build_structured_mesh(subdivisions);
    gram = assemble_operators(mesh).mass;
    const int n = mesh.node_count();
    std::mt19937 rng(1);
    std::normal_distribution<double> g;
    snapshots = Matrix::NullaryExpr(n, 200, [&] { return g(rng); });
    modes = snapshots.leftCols(10);
    coefficients = Matrix::NullaryExpr(101, 10, [&] { return g(rng); });
    w = Vector::NullaryExpr(n, [&] { return g(rng); });
    for (int k = 0; k < 101; ++k) fields.push_back(snapshots.col(k % 200));
  }
};

const Data& data() {
  static const Data d(141);
  return d;
}

template <bool Parallel>
void ColumnEnergies(benchmark::State& state) {
  const Data& d = data();
  for (auto _ : state) {
    Vector e = Parallel ? kernels::column_energies(d.snapshots, d.gram)
                        : kernels::serial::column_energies(d.snapshots, d.gram);
    benchmark::DoNotOptimize(e.data());
  }
}

template <bool Parallel>
void ColumnDots(benchmark::State& state) {
  const Data& d = data();
  for (auto _ : state) {
    Vector e = Parallel ? kernels::column_dots(d.snapshots, d.w) : kernels::serial::column_dots(d.snapshots, d.w);
    benchmark::DoNotOptimize(e.data());
  }
}

template <bool Parallel>
void ProjectFields(benchmark::State& state) {
  const Data& d = data();
  for (auto _ : state) {
    Matrix c = Parallel ? kernels::project_fields(d.fields, d.modes, d.gram)
                        : kernels::serial::project_fields(d.fields, d.modes, d.gram);
    benchmark::DoNotOptimize(c.data());
  }
}

template <bool Parallel>
void ReconstructFields(benchmark::State& state) {
  const Data& d = data();
  for (auto _ : state) {
    auto f = Parallel ? kernels::reconstruct_fields(d.coefficients, d.modes)
                      : kernels::serial::reconstruct_fields(d.coefficients, d.modes);
    benchmark::DoNotOptimize(f.data());
  }
}

template <bool Parallel>
void SubtractRankOne(benchmark::State& state) {
  const Data& d = data();
  Matrix m = d.snapshots;
  const Vector c = Vector::Constant(m.cols(), 1e-9);
  for (auto _ : state) {
    if (Parallel) {
      kernels::subtract_rank_one(m, d.w, c);
    } else {
      kernels::serial::subtract_rank_one(m, d.w, c);
    }
    benchmark::DoNotOptimize(m.data());
  }
}

}  // namespace

BENCHMARK(ColumnEnergies<false>)->Name("column_energies/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(ColumnEnergies<true>)->Name("column_energies/omp")->Unit(benchmark::kMillisecond);
BENCHMARK(ColumnDots<false>)->Name("column_dots/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(ColumnDots<true>)->Name("column_dots/omp")->Unit(benchmark::kMillisecond);
BENCHMARK(ProjectFields<false>)->Name("project_fields/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(ProjectFields<true>)->Name("project_fields/omp")->Unit(benchmark::kMillisecond);
BENCHMARK(ReconstructFields<false>)->Name("reconstruct_fields/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(ReconstructFields<true>)->Name("reconstruct_fields/omp")->Unit(benchmark::kMillisecond);
BENCHMARK(SubtractRankOne<false>)->Name("subtract_rank_one/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(SubtractRankOne<true>)->Name("subtract_rank_one/omp")->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
