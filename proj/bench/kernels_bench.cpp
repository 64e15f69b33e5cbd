// Parallel kernels against their serial references.
#include <benchmark/benchmark.h>

#include "atlas/oracle.hpp"
#include "atlas/sphere_mesh.hpp"

namespace {

const atlas::FieldPair& field()
{
    static atlas::FieldPair f(atlas::parse_polynomial("x^2*y^3 - 2*x*y*z + z^4 - y^2 + 3*x"));
    return f;
}

void BM_marching_tetrahedra(benchmark::State& st)
{
    auto box = atlas::Box::cube({0, 0, 0}, 4);
    for (auto _ : st) benchmark::DoNotOptimize(atlas::marching_tetrahedra(field().d, 0.5, box, st.range(0)));
}

void BM_marching_tetrahedra_serial(benchmark::State& st)
{
    auto box = atlas::Box::cube({0, 0, 0}, 4);
    for (auto _ : st) benchmark::DoNotOptimize(atlas::marching_tetrahedra_serial(field().d, 0.5, box, st.range(0)));
}

void BM_level_values(benchmark::State& st)
{
    auto mesh = atlas::build_mesh({0.1, 0.2, 0.3}, 5, static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(atlas::sample_level_values(field().d, mesh, 0.0));
}

void BM_level_values_serial(benchmark::State& st)
{
    auto mesh = atlas::build_mesh({0.1, 0.2, 0.3}, 5, static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(atlas::sample_level_values_serial(field().d, mesh, 0.0));
}

void BM_tangential_field(benchmark::State& st)
{
    auto mesh = atlas::build_mesh({0.1, 0.2, 0.3}, 5, static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(atlas::sample_tangential_field(field().d, mesh));
}

void BM_tangential_field_serial(benchmark::State& st)
{
    auto mesh = atlas::build_mesh({0.1, 0.2, 0.3}, 5, static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(atlas::sample_tangential_field_serial(field().d, mesh));
}

}  // namespace

BENCHMARK(BM_marching_tetrahedra)->Arg(32)->Arg(64);
BENCHMARK(BM_marching_tetrahedra_serial)->Arg(32)->Arg(64);
BENCHMARK(BM_level_values)->Arg(6)->Arg(8);
BENCHMARK(BM_level_values_serial)->Arg(6)->Arg(8);
BENCHMARK(BM_tangential_field)->Arg(6)->Arg(8);
BENCHMARK(BM_tangential_field_serial)->Arg(6)->Arg(8);

BENCHMARK_MAIN();
