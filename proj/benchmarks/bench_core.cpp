// Microbenchmarks for the hot paths: dense algebra, orbit features, the
// probabilistic layer, scheme sampling, and a full training step.

#include <benchmark/benchmark.h>

#include <vector>

#include "symlearn/bayes.hpp"
#include "symlearn/group.hpp"
#include "symlearn/invariant.hpp"
#include "symlearn/layers.hpp"
#include "symlearn/matrix.hpp"
#include "symlearn/model.hpp"
#include "symlearn/numeric.hpp"
#include "symlearn/rng.hpp"
#include "symlearn/train.hpp"

namespace {

using namespace symlearn;

Matrix gaussian_matrix(RngState& rng, std::size_t rows, std::size_t cols) {
    Matrix m(rows, cols);
    for (std::size_t i = 0, n = m.size(); i < n; ++i) m.data()[i] = rng.next_gaussian();
    return m;
}

void bm_matmul(benchmark::State& state) {
    RngState rng(1);
    const Matrix a = gaussian_matrix(rng, 128, 784);
    const Matrix b = gaussian_matrix(rng, 784, 100);
    for (auto _ : state) benchmark::DoNotOptimize(matmul(a, b));
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * 128 * 784 * 100);
}

void bm_reynolds_operator(benchmark::State& state) {
    const SymmetryGroup group = rotation_group(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(reynolds_operator(group));
}

void bm_orbit_features(benchmark::State& state) {
    const InvariantBasis basis = InvariantBasis::from_group(rotation_group(28));
    RngState rng(2);
    const Matrix x = gaussian_matrix(rng, 128, basis.dim());
    for (auto _ : state) benchmark::DoNotOptimize(basis.apply_batch(x));
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * 128);
}

ProbInvariantLayer make_bench_layer(RngState& rng) {
    std::vector<InvariantBasis> bases;
    bases.push_back(InvariantBasis::from_group(rotation_group(28)));
    bases.push_back(InvariantBasis::from_group(flip_group(28)));
    ProbInvariantLayer layer = make_prob_layer(std::move(bases), 100, 784);
    for (std::size_t i = 0, n = layer.A.size(); i < n; ++i)
        layer.A.data()[i] = 0.05 * rng.next_gaussian();
    return layer;
}

void bm_prob_forward(benchmark::State& state) {
    RngState rng(3);
    const ProbInvariantLayer layer = make_bench_layer(rng);
    const Matrix x = gaussian_matrix(rng, 128, 784);
    const Vector pi = {0.4, 0.4, 0.2};
    for (auto _ : state) benchmark::DoNotOptimize(prob_forward(layer, pi, x));
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * 128);
}

void bm_prob_backward(benchmark::State& state) {
    RngState rng(4);
    const ProbInvariantLayer layer = make_bench_layer(rng);
    const Matrix x = gaussian_matrix(rng, 128, 784);
    const Vector pi = {0.4, 0.4, 0.2};
    ProbCache cache;
    const Matrix out = prob_forward(layer, pi, x, &cache);
    for (auto _ : state) benchmark::DoNotOptimize(prob_backward(layer, cache, out));
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * 128);
}

void bm_gumbel_sample(benchmark::State& state) {
    RngState rng(5);
    const SchemeDistribution dist{Vector{0.1, -0.2, 0.3}, 1.0};
    for (auto _ : state) benchmark::DoNotOptimize(gumbel_softmax_sample(dist, rng));
}

void bm_training_step(benchmark::State& state) {
    ModelSpec spec;
    spec.kind = ModelKind::invariantnet;
    spec.groups = {"rot90", "flip"};
    spec.prior.type = "jeffreys";
    spec.seed = 6;
    TrainedModel model = build_model(spec);

    RngState rng(7);
    Matrix x(128, 784);
    for (std::size_t i = 0, n = x.size(); i < n; ++i) x.data()[i] = rng.next_uniform();
    std::vector<int> y(128);
    for (int& label : y) label = static_cast<int>(rng.next_below(10));

    std::vector<std::size_t> sizes;
    for (const auto& view : parameter_views(model)) sizes.push_back(view.size());
    AdamState adam(sizes, {});
    const Matrix features = precompute_features(model, x);
    ModelGrads grads;

    for (auto _ : state) {
        Vector noise(model.prob1.scheme_count());
        for (double& v : noise) v = standard_gumbel(rng);
        model_loss_and_grads(model, x, features, y, noise, 60000, grads);
        const auto params = parameter_views(model);
        adam_step(adam, params, gradient_views(grads, spec.kind));
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * 128);
}

BENCHMARK(bm_matmul);
BENCHMARK(bm_reynolds_operator)->Arg(8)->Arg(28);
BENCHMARK(bm_orbit_features);
BENCHMARK(bm_prob_forward);
BENCHMARK(bm_prob_backward);
BENCHMARK(bm_gumbel_sample);
BENCHMARK(bm_training_step);

}  // namespace

BENCHMARK_MAIN();
