#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "cham/cncc.hpp"
#include "cham/engine.hpp"
#include "cham/stages.hpp"

// End-to-end execution: each iteration runs the builtin learning program and
// dispatches every rule firing to its bound compute stage, so the trace that
// orders the numeric work is the CHAM trace itself.

namespace cham::pipeline {

struct PipelineError : std::runtime_error {
    int iteration;
    PipelineError(int iter, const std::string& what)
        : std::runtime_error("iteration " + std::to_string(iter) + ": " + what), iteration(iter) {}
};

struct PipelineConfig {
    int iterations = 5;
    int samples = 200;
    int classes = 2;
    double noise = 0.1;
    stages::ScConfig sc;
    int hidden = 64;
    stages::RlConfig rl;
    double eta = 0.5;
    double holdoutEvery = 4;  // every 4th sample is held out
    bool forceZeroEi = false;
};

struct PipelineMetrics {
    std::vector<double> perIterationError;
    double accuracyEnsemble = 0.0;
    double accuracyTemporalOnly = 0.0;
    double accuracySpatialOnly = 0.0;
    std::vector<std::vector<std::string>> traceRules;  // rule sequence per iteration
};

namespace detail {

using stages::Matrix;

// What the pipeline's stage bindings read and write, keyed by rule name.
// Checked against the builtin program's signatures before the first run.
inline std::map<std::string, StageSignature> binding_signatures() {
    return {
        {"TS_SC", {{"Mi", "Mn", "Es"}, {"Sa", "Sv"}}},
        {"TS_DL", {{"Sa", "Ma", "Sv", "Mv"}, {"Fa", "Fv"}}},
        {"TS_CC", {{"Fa", "Mt", "Fv", "Ms"}, {"Ct", "Cs"}}},
        {"TS_EL", {{"Ct", "Cs", "Fa", "Fv"}, {"Cp"}}},
        {"TS_RL", {{"Cp"}, {"Ei", "Es"}}},
        {"TS_IL", {{"Ei", "Cp"}, {"Mp", "Ma", "Mv", "Mt", "Ms", "Mn"}}},
    };
}

// The mutable feedback tokens carried across iterations.
struct FeedbackState {
    double es = 0.0;
    double ei = 0.0;
    std::vector<double> mn;      // T
    std::vector<double> mt, ms;  // classes
    Matrix ma, mv;               // classes x hidden (accumulated readout increments)
};

struct ForwardResult {
    double meanTrainError = 0.0;
    std::array<double, 4> expertWeights{};
    std::map<int, stages::ClassStats> observations;  // train split, per class
    double accEnsemble = 0.0, accTemporal = 0.0, accSpatial = 0.0;
    std::vector<std::string> ruleSequence;
};

struct PipelineRun {
    const std::vector<stages::MediaSample>& dataset;
    const PipelineConfig& cfg;
    std::uint64_t seed;
    ChamProgram program = builtin_cncc_learning();
    stages::DlModel model;
    std::vector<int> trainIdx, holdIdx;

    PipelineRun(const std::vector<stages::MediaSample>& data, const PipelineConfig& c, std::uint64_t s)
        : dataset(data), cfg(c), seed(s) {
        for (int i = 0; i < static_cast<int>(dataset.size()); ++i)
            (i % static_cast<int>(cfg.holdoutEvery) == static_cast<int>(cfg.holdoutEvery) - 1 ? holdIdx : trainIdx)
                .push_back(i);
        model = stages::make_dl_model(stages::kTemporalSize, stages::kSpatialSize * stages::kSpatialSize,
                                      cfg.hidden, cfg.classes, seed);
        fit_readout();
        check_bindings();
    }

    // Nearest-centroid readout fit on the training hidden features. This is
    // the deterministic stand-in for the deep training the stages abstract.
    void fit_readout() {
        Matrix saT, saS;
        densify_saliency(trainIdx, {}, 0.0, saT, saS);
        Matrix ht = stages::detail::hidden_features(saT, model.temporal);
        Matrix hs = stages::detail::hidden_features(saS, model.spatial);
        auto fit = [this](stages::ModalityModel& m, const Matrix& h, const std::vector<int>& idx) {
            std::vector<int> counts(cfg.classes, 0);
            Matrix centroid(cfg.classes, h.cols);
            for (int r = 0; r < h.rows; ++r) {
                int cls = dataset[idx[r]].label;
                ++counts[cls];
                for (int j = 0; j < h.cols; ++j) centroid.at(cls, j) += h.at(r, j);
            }
            for (int c = 0; c < cfg.classes; ++c)
                if (counts[c])
                    for (int j = 0; j < h.cols; ++j) centroid.at(c, j) /= counts[c];
            m.readout = centroid;
            for (int c = 0; c < cfg.classes; ++c) {
                double sq = 0.0;
                for (int j = 0; j < h.cols; ++j) sq += centroid.at(c, j) * centroid.at(c, j);
                m.bias[c] = -0.5 * sq;  // linearized nearest-centroid score
            }
        };
        fit(model.temporal, ht, trainIdx);
        fit(model.spatial, hs, trainIdx);
    }

    void check_bindings() const {
        CnccFramework fw = builtin_cncc_framework();
        auto bound = binding_signatures();
        for (const auto& [rule, sig] : fw.stageSignatures) {
            auto it = bound.find(rule);
            if (it == bound.end() || it->second.inputs != sig.inputs || it->second.outputs != sig.outputs)
                throw PipelineError(0, "stage binding for " + rule + " does not match the program signature");
        }
    }

    void densify_saliency(const std::vector<int>& idx, const std::vector<double>& mn, double es, Matrix& saT,
                          Matrix& saS) const {
        const int n = static_cast<int>(idx.size());
        saT = Matrix(n, stages::kTemporalSize);
        saS = Matrix(n, stages::kSpatialSize * stages::kSpatialSize);
        for (int r = 0; r < n; ++r) {
            stages::SaliencyPair sal = stages::stage_sc(dataset[idx[r]], mn, es, cfg.sc);
            for (const auto& e : sal.temporal) saT.at(r, e.index) = e.value;
            for (const auto& e : sal.spatial) saS.a[static_cast<std::size_t>(r) * saS.cols + e.index] = e.value;
        }
    }

    // One pass over the data, ordered by the CHAM trace of the learning
    // program. Evaluates train error, expert weights, per-class
    // observations for the memory stage, and held-out accuracies.
    ForwardResult forward(const FeedbackState& fb, int iteration) const {
        Trace trace = run(program, program.initial, SchedulerPolicy::Lexicographic, 100, seed);
        ForwardResult out;
        Matrix saT, saS, hsaT, hsaS;  // train / holdout saliency
        stages::SenseFeatures fa, hfa;
        Matrix hidT, hidS;
        std::vector<std::vector<double>> ct(trainIdx.size()), cs(trainIdx.size());
        std::vector<stages::SemanticDecision> decisions(trainIdx.size());
        std::vector<double> prior(cfg.classes, 1.0 / cfg.classes);
        std::array<double, 4> weights{};
        double errSum = 0.0;

        for (const TraceStep& step : trace.steps) {
            out.ruleSequence.push_back(step.rule);
            if (step.rule == "TS_SC") {
                densify_saliency(trainIdx, fb.mn, fb.es, saT, saS);
                densify_saliency(holdIdx, fb.mn, fb.es, hsaT, hsaS);
            } else if (step.rule == "TS_DL") {
                fa = stages::stage_dl(saT, fb.ma, saS, fb.mv, model, &hidT, &hidS);
                hfa = stages::stage_dl(hsaT, fb.ma, hsaS, fb.mv, model);
            } else if (step.rule == "TS_CC") {
                for (std::size_t i = 0; i < trainIdx.size(); ++i) {
                    Matrix rowT = row_of(fa.temporal, static_cast<int>(i));
                    Matrix rowS = row_of(fa.spatial, static_cast<int>(i));
                    stages::PerceptFeatures pf = stages::stage_cc(rowT, fb.mt, rowS, fb.ms, prior);
                    ct[i] = std::move(pf.temporalTopic);
                    cs[i] = std::move(pf.spatialTopic);
                }
            } else if (step.rule == "TS_EL") {
                weights = expert_weights(fa, ct, cs);
                out.expertWeights = weights;
                for (std::size_t i = 0; i < trainIdx.size(); ++i)
                    decisions[i] = stages::stage_el(ct[i], cs[i], row_of(fa.temporal, static_cast<int>(i)),
                                                    row_of(fa.spatial, static_cast<int>(i)), weights);
            } else if (step.rule == "TS_RL") {
                for (std::size_t i = 0; i < trainIdx.size(); ++i)
                    errSum += stages::stage_rl(decisions[i], dataset[trainIdx[i]].label, cfg.rl).error;
            } else if (step.rule == "TS_IL") {
                out.observations = collect_observations(fa, ct, cs, hidT, hidS, saT);
            }
        }
        if (out.ruleSequence.size() != 6)
            throw PipelineError(iteration, "learning program fired " + std::to_string(out.ruleSequence.size()) +
                                               " rules instead of 6");
        out.meanTrainError = trainIdx.empty() ? 0.0 : errSum / trainIdx.size();

        // Held-out accuracies: ensemble vote vs each modality expert alone.
        int okE = 0, okT = 0, okS = 0;
        for (std::size_t i = 0; i < holdIdx.size(); ++i) {
            Matrix rowT = row_of(hfa.temporal, static_cast<int>(i));
            Matrix rowS = row_of(hfa.spatial, static_cast<int>(i));
            stages::PerceptFeatures pf = stages::stage_cc(rowT, fb.mt, rowS, fb.ms, prior);
            stages::SemanticDecision d = stages::stage_el(pf.temporalTopic, pf.spatialTopic, rowT, rowS, weights);
            int truth = dataset[holdIdx[i]].label;
            okE += d.label == truth;
            okT += stages::detail::argmax_tiebreak_low(stages::detail::mean_row(rowT)) == truth;
            okS += stages::detail::argmax_tiebreak_low(stages::detail::mean_row(rowS)) == truth;
        }
        if (!holdIdx.empty()) {
            out.accEnsemble = static_cast<double>(okE) / holdIdx.size();
            out.accTemporal = static_cast<double>(okT) / holdIdx.size();
            out.accSpatial = static_cast<double>(okS) / holdIdx.size();
        }
        return out;
    }

    static Matrix row_of(const Matrix& m, int r) {
        Matrix out(1, m.cols);
        for (int c = 0; c < m.cols; ++c) out.at(0, c) = m.at(r, c);
        return out;
    }

    std::array<double, 4> expert_weights(const stages::SenseFeatures& fa, const std::vector<std::vector<double>>& ct,
                                         const std::vector<std::vector<double>>& cs) const {
        std::array<int, 4> wrong{};
        for (std::size_t i = 0; i < trainIdx.size(); ++i) {
            int truth = dataset[trainIdx[i]].label;
            wrong[0] += stages::detail::argmax_tiebreak_low(ct[i]) != truth;
            wrong[1] += stages::detail::argmax_tiebreak_low(cs[i]) != truth;
            wrong[2] += stages::detail::argmax_tiebreak_low(
                            stages::detail::mean_row(row_of(fa.temporal, static_cast<int>(i)))) != truth;
            wrong[3] += stages::detail::argmax_tiebreak_low(
                            stages::detail::mean_row(row_of(fa.spatial, static_cast<int>(i)))) != truth;
        }
        std::array<double, 4> weights{};
        bool any = false;
        for (int j = 0; j < 4; ++j) {
            double eps = trainIdx.empty() ? 0.5 : static_cast<double>(wrong[j]) / trainIdx.size();
            weights[j] = std::max(0.0, stages::adaboost_alpha(eps));
            any = any || weights[j] > 0.0;
        }
        if (!any) weights.fill(1.0);  // every expert at or below chance
        return weights;
    }

    std::map<int, stages::ClassStats> collect_observations(const stages::SenseFeatures& fa,
                                                           const std::vector<std::vector<double>>& ct,
                                                           const std::vector<std::vector<double>>& cs,
                                                           const Matrix& hidT, const Matrix& hidS,
                                                           const Matrix& saT) const {
        std::map<int, stages::ClassStats> obs;
        std::map<int, int> counts;
        for (std::size_t i = 0; i < trainIdx.size(); ++i) {
            int cls = dataset[trainIdx[i]].label;
            stages::ClassStats& s = obs[cls];
            auto acc = [](std::vector<double>& dst, auto get, int size) {
                if (dst.size() != static_cast<std::size_t>(size)) dst.assign(size, 0.0);
                for (int j = 0; j < size; ++j) dst[j] += get(j);
            };
            acc(s.faRow, [&](int j) { return fa.temporal.at(static_cast<int>(i), j); }, cfg.classes);
            acc(s.fvRow, [&](int j) { return fa.spatial.at(static_cast<int>(i), j); }, cfg.classes);
            acc(s.ct, [&](int j) { return ct[i][j]; }, cfg.classes);
            acc(s.cs, [&](int j) { return cs[i][j]; }, cfg.classes);
            acc(s.attention, [&](int j) { return saT.at(static_cast<int>(i), j); }, stages::kTemporalSize);
            ++counts[cls];
        }
        for (auto& [cls, s] : obs) {
            double inv = 1.0 / counts[cls];
            for (auto* v : {&s.faRow, &s.fvRow, &s.ct, &s.cs, &s.attention})
                for (double& x : *v) x *= inv;
            // Correction-style observations: push mass toward the true class.
            s.topicCorrT.assign(cfg.classes, 0.0);
            s.topicCorrS.assign(cfg.classes, 0.0);
            for (int c = 0; c < cfg.classes; ++c) {
                s.topicCorrT[c] = (c == cls ? 1.0 : 0.0) - s.ct[c];
                s.topicCorrS[c] = (c == cls ? 1.0 : 0.0) - s.cs[c];
            }
            s.readoutCorrT = Matrix(cfg.classes, cfg.hidden);
            s.readoutCorrS = Matrix(cfg.classes, cfg.hidden);
        }
        // Perceptron-direction observations need per-class mean hidden rows.
        std::map<int, std::vector<double>> hT, hS;
        for (std::size_t i = 0; i < trainIdx.size(); ++i) {
            int cls = dataset[trainIdx[i]].label;
            auto& t = hT[cls];
            auto& sp = hS[cls];
            if (t.empty()) t.assign(cfg.hidden, 0.0);
            if (sp.empty()) sp.assign(cfg.hidden, 0.0);
            for (int j = 0; j < cfg.hidden; ++j) {
                t[j] += hidT.at(static_cast<int>(i), j);
                sp[j] += hidS.at(static_cast<int>(i), j);
            }
        }
        for (auto& [cls, s] : obs) {
            double inv = 1.0 / counts[cls];
            for (int c = 0; c < cfg.classes; ++c) {
                double errT = (c == cls ? 1.0 : 0.0) - s.faRow[c];
                double errS = (c == cls ? 1.0 : 0.0) - s.fvRow[c];
                for (int j = 0; j < cfg.hidden; ++j) {
                    s.readoutCorrT.at(c, j) = errT * hT[cls][j] * inv;
                    s.readoutCorrS.at(c, j) = errS * hS[cls][j] * inv;
                }
            }
        }
        return obs;
    }
};

}  // namespace detail

inline PipelineMetrics run_pipeline(const std::vector<stages::MediaSample>& dataset, int iterations,
                                    const PipelineConfig& cfg, std::uint64_t seed) {
    if (iterations < 1) throw PipelineError(0, "iterations must be >= 1");
    detail::PipelineRun runner(dataset, cfg, seed);
    detail::FeedbackState fb;
    fb.mt.assign(cfg.classes, 0.0);
    fb.ms.assign(cfg.classes, 0.0);
    fb.mn.assign(stages::kTemporalSize, 0.0);
    stages::MemoryBuffer memory;
    PipelineMetrics metrics;

    for (int iter = 1; iter <= iterations; ++iter) {
        detail::ForwardResult fwd;
        try {
            fwd = runner.forward(fb, iter);
        } catch (const stages::StageError& e) {
            throw PipelineError(iter, e.what());
        }
        metrics.perIterationError.push_back(fwd.meanTrainError);
        metrics.traceRules.push_back(fwd.ruleSequence);
        metrics.accuracyEnsemble = fwd.accEnsemble;
        metrics.accuracyTemporalOnly = fwd.accTemporal;
        metrics.accuracySpatialOnly = fwd.accSpatial;

        // Feedback tokens for the next iteration. Ei drives the memory
        // stage; the candidate update is kept only if it does not raise the
        // training error (evaluated by a lookahead pass).
        stages::RlFeedback rl;
        rl.error = fwd.meanTrainError;
        rl.es = cfg.rl.lambdaS * rl.error;
        rl.ei = cfg.forceZeroEi ? 0.0 : cfg.rl.lambdaI * rl.error;

        if (iter == iterations) break;  // no successor pass to feed

        stages::MemoryBuffer candidateMemory = memory;
        stages::FeedbackBundle bundle = stages::stage_il(rl.ei, fwd.observations, candidateMemory, cfg.eta);
        detail::FeedbackState candidate = fb;
        candidate.es = rl.es;
        candidate.ei = rl.ei;
        auto addVec = [](std::vector<double>& dst, const std::vector<double>& inc) {
            if (dst.size() < inc.size()) dst.resize(inc.size(), 0.0);
            for (std::size_t i = 0; i < inc.size(); ++i) dst[i] += inc[i];
        };
        auto addMat = [](stages::Matrix& dst, const stages::Matrix& inc) {
            if (inc.empty()) return;
            if (dst.empty()) dst = stages::Matrix(inc.rows, inc.cols);
            for (std::size_t i = 0; i < inc.a.size(); ++i) dst.a[i] += inc.a[i];
        };
        addVec(candidate.mn, bundle.mn);
        addVec(candidate.mt, bundle.mt);
        addVec(candidate.ms, bundle.ms);
        addMat(candidate.ma, bundle.ma);
        addMat(candidate.mv, bundle.mv);

        double candidateError = runner.forward(candidate, iter).meanTrainError;
        if (stages::accept_if_improved(bundle, candidateError, fwd.meanTrainError)) {
            memory = std::move(candidateMemory);
            memory.lastError = candidateError;
            fb = std::move(candidate);
        } else {
            fb.es = rl.es;  // the scalar feedback tokens always flow
            fb.ei = rl.ei;
        }
    }
    return metrics;
}

inline nlohmann::ordered_json metrics_to_json(const PipelineMetrics& m, const PipelineConfig& cfg,
                                              std::uint64_t seed) {
    nlohmann::ordered_json doc;
    doc["config"] = {{"iterations", cfg.iterations}, {"samples", cfg.samples},   {"classes", cfg.classes},
                     {"noise", cfg.noise},           {"sparsity", cfg.sc.sparsity}, {"hidden", cfg.hidden}};
    doc["seed"] = seed;
    doc["iterations"] = nlohmann::ordered_json::array();
    for (double e : m.perIterationError) doc["iterations"].push_back({{"error", e}});
    doc["accuracy"] = {{"ensemble", m.accuracyEnsemble},
                       {"temporal", m.accuracyTemporalOnly},
                       {"spatial", m.accuracySpatialOnly}};
    doc["trace"] = m.traceRules;
    return doc;
}

}  // namespace cham::pipeline
