// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include "papageno/features.hpp"
#include "papageno/ovo.hpp"
#include "papageno/preprocess.hpp"
#include "synthetic.hpp"

using namespace papageno;

namespace {

struct Fixture {
    std::vector<preprocess::TokenSequence> docs;
    std::vector<std::string> labels;
    features::TfIdfModel vocab;
    std::vector<SparseVector> x;
    models::OvOModel model;

    Fixture() {
        synthetic::Options o;
        o.documents = 6000;
        const auto set = synthetic::make_corpus(o);
        labels = set.labels(Level::task1);
        for (const auto& e : set.entries) docs.push_back(preprocess::pipeline(e.tweet.text, {}));
        vocab = features::build_vocab(docs, {2, 10000});
        x = features::transform_all_serial(vocab, docs);
        model = models::train_ovo_serial(x, labels, vocab.size(), level_classes(Level::task1), {});
    }
};

const Fixture& fixture() {
    static const Fixture f;
    return f;
}

void BM_TransformSerial(benchmark::State& state) {
    const auto& f = fixture();
    for (auto _ : state) benchmark::DoNotOptimize(features::transform_all_serial(f.vocab, f.docs));
}

void BM_TransformParallel(benchmark::State& state) {
    const auto& f = fixture();
    for (auto _ : state) benchmark::DoNotOptimize(features::transform_all(f.vocab, f.docs));
}

void BM_TrainOvoSerial(benchmark::State& state) {
    const auto& f = fixture();
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            models::train_ovo_serial(f.x, f.labels, f.vocab.size(), level_classes(Level::task1), {}));
    }
}

void BM_TrainOvoParallel(benchmark::State& state) {
    const auto& f = fixture();
    for (auto _ : state) {
        benchmark::DoNotOptimize(models::train_ovo(f.x, f.labels, f.vocab.size(), level_classes(Level::task1), {}));
    }
}

void BM_PredictSerial(benchmark::State& state) {
    const auto& f = fixture();
    for (auto _ : state) benchmark::DoNotOptimize(models::predict_all_serial(f.model, f.x));
}

void BM_PredictParallel(benchmark::State& state) {
    const auto& f = fixture();
    for (auto _ : state) benchmark::DoNotOptimize(models::predict_all(f.model, f.x));
}

}  // namespace

BENCHMARK(BM_TransformSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TransformParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TrainOvoSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TrainOvoParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PredictSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PredictParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
