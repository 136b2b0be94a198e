#include <benchmark/benchmark.h>

#include <complex>
#include <random>
#include <vector>

#include "mqc/driver.hpp"
#include "mqc/locate.hpp"
#include "support/fixtures.hpp"

using namespace mqc;
using namespace mqc::testing;

namespace {

TriMesh make_disk(int n) { return structured_disk(n); }

BeltramiField random_mu(const TriMesh& mesh, double magnitude) {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> uni(-magnitude, magnitude);
    BeltramiField mu{&mesh, {}};
    for (int f = 0; f < mesh.num_faces(); ++f) mu.values.push_back({uni(rng), uni(rng)});
    return mu;
}

void BM_assemble(benchmark::State& state) {
    auto mesh = make_disk(static_cast<int>(state.range(0)));
    auto chart = identity_embedding(mesh);
    auto mu = random_mu(mesh, 0.3);
    for (auto _ : state) {
        auto sys = assemble(chart, mu);
        benchmark::DoNotOptimize(sys.M);
    }
    state.counters["faces"] = mesh.num_faces();
}
BENCHMARK(BM_assemble)->Arg(8)->Arg(16)->Arg(32);

void BM_solve_lbs(benchmark::State& state) {
    auto mesh = make_disk(static_cast<int>(state.range(0)));
    auto chart = identity_embedding(mesh);
    auto sys = assemble(chart, random_mu(mesh, 0.3));
    auto constraint = Constraint::dirichlet(mesh, chart);
    for (auto _ : state) {
        auto res = solve_lbs(sys, constraint);
        benchmark::DoNotOptimize(res.map.positions);
    }
    state.counters["faces"] = mesh.num_faces();
}
BENCHMARK(BM_solve_lbs)->Arg(8)->Arg(16)->Arg(32);

void BM_transport_step(benchmark::State& state) {
    auto mesh = make_disk(static_cast<int>(state.range(0)));
    auto map = identity_embedding(mesh);
    auto source = FaceDensity::area_induced(mesh);
    auto ref = ReferenceDensity::gaussian({0.0, 0.0}, 2.0);
    ref.normalize(map);
    FlowParams p;
    for (auto _ : state) {
        auto r = transport_apply(map, source, ref, p.tau_fp, p);
        benchmark::DoNotOptimize(r.map.positions);
    }
    state.counters["faces"] = mesh.num_faces();
}
BENCHMARK(BM_transport_step)->Arg(8)->Arg(16)->Arg(32);

void BM_locate(benchmark::State& state) {
    auto mesh = make_disk(16);
    auto map = identity_embedding(mesh);
    PointLocator locator(map);
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> uni(-0.7, 0.7);
    std::vector<Vec2> queries;
    for (int i = 0; i < 1024; ++i) queries.push_back({uni(rng), uni(rng)});
    for (auto _ : state) {
        for (const auto& q : queries) {
            auto hit = locator.locate(q);
            benchmark::DoNotOptimize(hit);
        }
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(queries.size()));
}
BENCHMARK(BM_locate);

}  // namespace

BENCHMARK_MAIN();
