#include "gsf/experiment.hpp"
#include "gsf/gsf_bank.hpp"
#include "gsf/reduction.hpp"

#include <benchmark/benchmark.h>

namespace {

struct Fixture {
    gsf::SystemModel model;
    gsf::Trajectory traj;
    gsf::KalmanState prior;

    explicit Fixture(int model_id, std::size_t steps = 200)
        : model(gsf::build_synthetic_model({model_id, 0.4}, gsf::TimeGrid::uniform(steps))),
          traj([&] {
              gsf::Rng rng(5);
              return gsf::simulate(model, gsf::VectorXd::Zero(2), gsf::TimeGrid::uniform(steps),
                                   rng);
          }()),
          prior{gsf::VectorXd::Zero(2), 1e-2 * gsf::MatrixXd::Identity(2, 2), 0} {}
};

void BM_GsfStep(benchmark::State& state) {
    const Fixture f(1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(gsf::gsf_step(f.prior, f.model, f.traj.measurements[0], 0));
    }
    state.SetItemsProcessed(state.iterations() * 25);
}
BENCHMARK(BM_GsfStep);

void BM_Reduction(benchmark::State& state, const char* id) {
    const Fixture f(1);
    const gsf::MatrixXd p0 = f.prior.cov;
    const gsf::Method method = gsf::make_method(id, f.model, p0, f.traj.size());
    const gsf::PosteriorMixture p = gsf::gsf_step(f.prior, f.model, f.traj.measurements[0], 0);
    const std::optional<gsf::ModelIndex> truth = gsf::ModelIndex{f.traj.active_v[0], f.traj.active_w[0]};
    for (auto _ : state) {
        benchmark::DoNotOptimize(gsf::reduce(*method.scheme, p, f.prior, f.model,
                                             f.traj.measurements[0], truth));
    }
}
BENCHMARK_CAPTURE(BM_Reduction, merge, "merge");
BENCHMARK_CAPTURE(BM_Reduction, remove, "remove");
BENCHMARK_CAPTURE(BM_Reduction, matched, "matched");
BENCHMARK_CAPTURE(BM_Reduction, gsfm, "proposed:gsfm");
BENCHMARK_CAPTURE(BM_Reduction, gsfr, "proposed:gsfr");
BENCHMARK_CAPTURE(BM_Reduction, pkg, "proposed:pkg");
BENCHMARK_CAPTURE(BM_Reduction, ssg, "proposed:ssg");
BENCHMARK_CAPTURE(BM_Reduction, dkg, "proposed:dkg");

void BM_RunFilter(benchmark::State& state, const char* id) {
    const Fixture f(1);
    const gsf::Method method = gsf::make_method(id, f.model, f.prior.cov, f.traj.size());
    for (auto _ : state) {
        benchmark::DoNotOptimize(gsf::run_filter(method, f.model, f.traj, f.prior));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.traj.size()));
}
BENCHMARK_CAPTURE(BM_RunFilter, kalman, "kalman");
BENCHMARK_CAPTURE(BM_RunFilter, merge, "merge");
BENCHMARK_CAPTURE(BM_RunFilter, dkg, "proposed:dkg");

void BM_KlMc(benchmark::State& state) {
    const gsf::GaussianMixture m = gsf::build_table1(1, 0.21).process;
    const gsf::Gaussian g = gsf::moment_match(m);
    gsf::Rng rng(1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(gsf::kl_mc(m, g, static_cast<std::size_t>(state.range(0)), rng));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_KlMc)->Arg(1000)->Arg(200000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
