#include <doctest.h>

#include "cham/pipeline.hpp"

using namespace cham;
using namespace cham::pipeline;

namespace {

PipelineMetrics default_run(std::uint64_t seed, bool forceZeroEi = false, int iterations = 5) {
    PipelineConfig cfg;
    cfg.iterations = iterations;
    cfg.forceZeroEi = forceZeroEi;
    auto dataset = stages::gen_synthetic_dataset(seed, cfg.samples, cfg.classes, cfg.noise);
    return run_pipeline(dataset, cfg.iterations, cfg, seed);
}

}  // namespace

TEST_CASE("pipeline error is non-increasing on the default config") {
    PipelineMetrics m = default_run(1);
    REQUIRE(m.perIterationError.size() == 5);
    for (std::size_t i = 1; i < m.perIterationError.size(); ++i)
        CHECK(m.perIterationError[i] <= m.perIterationError[i - 1] + 1e-12);
    for (double e : m.perIterationError) {
        CHECK(e >= 0.0);
        CHECK(e <= 1.0);
    }
}

TEST_CASE("every iteration's trace is the canonical six-rule sequence") {
    PipelineMetrics m = default_run(1);
    std::vector<std::string> want = {"TS_SC", "TS_DL", "TS_CC", "TS_EL", "TS_RL", "TS_IL"};
    REQUIRE(m.traceRules.size() == 5);
    for (const auto& seq : m.traceRules) CHECK(seq == want);
}

TEST_CASE("ensemble held-out accuracy keeps up with the best single modality") {
    PipelineMetrics m = default_run(1);
    double best = std::max(m.accuracyTemporalOnly, m.accuracySpatialOnly);
    CHECK(m.accuracyEnsemble >= best - 0.02);
}

TEST_CASE("forcing Ei to zero freezes the error curve") {
    PipelineMetrics m = default_run(1, true);
    REQUIRE(m.perIterationError.size() == 5);
    for (double e : m.perIterationError) CHECK(e == m.perIterationError.front());
}

TEST_CASE("pipeline metrics are deterministic for a fixed seed") {
    PipelineConfig cfg;
    auto a = metrics_to_json(default_run(42), cfg, 42).dump();
    auto b = metrics_to_json(default_run(42), cfg, 42).dump();
    CHECK(a == b);
    auto c = metrics_to_json(default_run(43), cfg, 43).dump();
    CHECK(a != c);
}

TEST_CASE("one iteration yields exactly one error entry") {
    PipelineMetrics m = default_run(1, false, 1);
    CHECK(m.perIterationError.size() == 1);
    CHECK(m.traceRules.size() == 1);
}

TEST_CASE("iterations below one are rejected with the iteration index") {
    PipelineConfig cfg;
    auto dataset = stages::gen_synthetic_dataset(1, 8, 2, 0.1);
    try {
        run_pipeline(dataset, 0, cfg, 1);
        FAIL("expected PipelineError");
    } catch (const PipelineError& e) {
        CHECK(e.iteration == 0);
    }
}

TEST_CASE("stage bindings agree with the builtin program signatures") {
    CnccFramework f = builtin_cncc_framework();
    auto bound = cham::pipeline::detail::binding_signatures();
    REQUIRE(bound.size() == f.stageSignatures.size());
    for (const auto& [rule, sig] : f.stageSignatures) {
        REQUIRE(bound.count(rule));
        CHECK(bound.at(rule).inputs == sig.inputs);
        CHECK(bound.at(rule).outputs == sig.outputs);
    }
}

TEST_CASE("metrics JSON has the documented layout") {
    PipelineConfig cfg;
    PipelineMetrics m = default_run(1);
    auto doc = metrics_to_json(m, cfg, 1);
    CHECK(doc.contains("config"));
    CHECK(doc["seed"] == 1);
    CHECK(doc["iterations"].size() == 5);
    CHECK(doc["iterations"][0].contains("error"));
    CHECK(doc["accuracy"].contains("ensemble"));
    CHECK(doc["accuracy"].contains("temporal"));
    CHECK(doc["accuracy"].contains("spatial"));
    CHECK(doc["trace"].size() == 5);
}

TEST_CASE("pipeline works on more classes and smaller datasets") {
    PipelineConfig cfg;
    cfg.samples = 40;
    cfg.classes = 3;
    cfg.iterations = 3;
    auto dataset = stages::gen_synthetic_dataset(5, cfg.samples, cfg.classes, cfg.noise);
    PipelineMetrics m = run_pipeline(dataset, cfg.iterations, cfg, 5);
    REQUIRE(m.perIterationError.size() == 3);
    for (std::size_t i = 1; i < m.perIterationError.size(); ++i)
        CHECK(m.perIterationError[i] <= m.perIterationError[i - 1] + 1e-12);
}
