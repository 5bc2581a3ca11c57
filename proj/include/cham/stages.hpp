#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "cham/term.hpp"

// Reference implementations of the six compute stages, one per reaction
// rule, plus the synthetic cross-modal dataset they run on. Every stage is a
// pure function of (inputs, config, seed); all randomness flows from a
// single 64-bit seed through stage_seed().

namespace cham::stages {

struct StageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DimensionMismatch : StageError {
    explicit DimensionMismatch(const std::string& what) : StageError("dimension mismatch: " + what) {}
};
struct NoExperts : StageError {
    NoExperts() : StageError("all ensemble expert weights are zero") {}
};

struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> a;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}
    double& at(int r, int c) { return a[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return a[static_cast<std::size_t>(r) * cols + c]; }
    bool empty() const { return rows == 0 || cols == 0; }

    friend bool operator==(const Matrix&, const Matrix&) = default;
};

// splitmix64; the standard way to fan one seed out into independent streams.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t stage_seed(std::uint64_t seed, std::string_view stageName, int iteration) {
    std::uint64_t h = seed;
    for (char c : stageName) h = splitmix64(h ^ static_cast<std::uint64_t>(static_cast<unsigned char>(c)));
    return splitmix64(h ^ static_cast<std::uint64_t>(iteration));
}

// ---------------------------------------------------------------------------
// Data carried by the tokens.

struct MediaSample {
    Matrix spatial;                 // H x W "image" modality
    std::vector<double> temporal;   // length T "audio" modality
    int label = -1;
};

struct SparseEntry {
    int index = 0;   // row-major flat index
    double value = 0.0;
};

struct SaliencyPair {
    std::vector<SparseEntry> temporal;  // sorted by index
    std::vector<SparseEntry> spatial;   // sorted by flat index
    int temporalSize = 0;
    int spatialRows = 0, spatialCols = 0;
    double sparsity = 0.0;
    bool degenerate = false;
};

struct SenseFeatures {
    Matrix temporal;  // n x classes, row-stochastic
    Matrix spatial;
};

struct PerceptFeatures {
    std::vector<double> temporalTopic;
    std::vector<double> spatialTopic;
    bool degenerateTemporal = false;
    bool degenerateSpatial = false;
};

struct SemanticDecision {
    int label = 0;
    double score = 0.0;                  // winning weight mass / total mass
    std::vector<double> classMass;       // normalized per-class weight mass
};

struct FeedbackBundle {
    double ei = 0.0;
    double es = 0.0;
    std::vector<double> mp;   // memory feedback
    Matrix ma, mv;            // readout increments, classes x hidden
    std::vector<double> mt, ms;  // topic increments, length classes
    std::vector<double> mn;   // attention increment, length T

    void zero() {
        std::fill(mp.begin(), mp.end(), 0.0);
        std::fill(ma.a.begin(), ma.a.end(), 0.0);
        std::fill(mv.a.begin(), mv.a.end(), 0.0);
        std::fill(mt.begin(), mt.end(), 0.0);
        std::fill(ms.begin(), ms.end(), 0.0);
        std::fill(mn.begin(), mn.end(), 0.0);
    }
};

// ---------------------------------------------------------------------------
// SC: local-contrast saliency with top-k sparsification.

struct ScConfig {
    double sparsity = 0.25;  // fraction of entries retained, (0, 1]
    int window = 3;          // odd local-mean window
};

namespace detail {

inline bool all_equal(const std::vector<double>& v) {
    for (double x : v)
        if (x != v.front()) return false;
    return true;
}

// Keep the k largest strictly positive entries; ties go to the lower index.
inline std::vector<SparseEntry> top_k(const std::vector<double>& contrast, int k) {
    std::vector<int> idx;
    for (int i = 0; i < static_cast<int>(contrast.size()); ++i)
        if (contrast[i] > 0.0) idx.push_back(i);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return contrast[a] > contrast[b]; });
    if (static_cast<int>(idx.size()) > k) idx.resize(k);
    std::sort(idx.begin(), idx.end());
    std::vector<SparseEntry> out;
    out.reserve(idx.size());
    for (int i : idx) out.push_back({i, contrast[i]});
    return out;
}

}  // namespace detail

// Contrast against the local mean, biased by the attention increment,
// scaled by (1 + Es), then sparsified to the top-k entries per map. An
// all-equal input map has no contrast: it yields an all-zero map and sets
// the degenerate flag.
inline SaliencyPair stage_sc(const MediaSample& sample, const std::vector<double>& mn, double es,
                             const ScConfig& cfg) {
    if (cfg.sparsity <= 0.0 || cfg.sparsity > 1.0) throw StageError("sparsity must be in (0,1]");
    SaliencyPair out;
    out.sparsity = cfg.sparsity;
    out.temporalSize = static_cast<int>(sample.temporal.size());
    out.spatialRows = sample.spatial.rows;
    out.spatialCols = sample.spatial.cols;
    const int half = cfg.window / 2;
    const double scale = 1.0 + es;
    const double mnMean = mn.empty() ? 0.0 : std::accumulate(mn.begin(), mn.end(), 0.0) / mn.size();

    // Temporal: window along the axis, Mn applied elementwise.
    if (detail::all_equal(sample.temporal)) {
        out.degenerate = true;
    } else {
        const int t = out.temporalSize;
        std::vector<double> contrast(t, 0.0);
        for (int i = 0; i < t; ++i) {
            int lo = std::max(0, i - half), hi = std::min(t - 1, i + half);
            double mean = 0.0;
            for (int j = lo; j <= hi; ++j) mean += sample.temporal[j];
            mean /= (hi - lo + 1);
            double bias = i < static_cast<int>(mn.size()) ? mn[i] : 0.0;
            contrast[i] = (std::abs(sample.temporal[i] - mean) + bias) * scale;
        }
        int k = static_cast<int>(std::ceil(cfg.sparsity * t));
        out.temporal = detail::top_k(contrast, k);
    }

    // Spatial: square window, Mn contributes its mean as a uniform bias.
    if (detail::all_equal(sample.spatial.a)) {
        out.degenerate = true;
    } else {
        const int h = sample.spatial.rows, w = sample.spatial.cols;
        std::vector<double> contrast(static_cast<std::size_t>(h) * w, 0.0);
        for (int r = 0; r < h; ++r)
            for (int c = 0; c < w; ++c) {
                int rlo = std::max(0, r - half), rhi = std::min(h - 1, r + half);
                int clo = std::max(0, c - half), chi = std::min(w - 1, c + half);
                double mean = 0.0;
                for (int rr = rlo; rr <= rhi; ++rr)
                    for (int cc = clo; cc <= chi; ++cc) mean += sample.spatial.at(rr, cc);
                mean /= (rhi - rlo + 1) * (chi - clo + 1);
                contrast[static_cast<std::size_t>(r) * w + c] =
                    (std::abs(sample.spatial.at(r, c) - mean) + mnMean) * scale;
            }
        int k = static_cast<int>(std::ceil(cfg.sparsity * h * w));
        out.spatial = detail::top_k(contrast, k);
    }
    return out;
}

inline std::vector<double> densify(const std::vector<SparseEntry>& entries, int size) {
    std::vector<double> out(size, 0.0);
    for (const auto& e : entries) out[e.index] = e.value;
    return out;
}

// ---------------------------------------------------------------------------
// DL: seeded random-feature classifier, one model per modality.

struct ModalityModel {
    Matrix projection;  // hidden x input
    Matrix readout;     // classes x hidden
    std::vector<double> bias;  // classes
};

struct DlModel {
    ModalityModel temporal;
    ModalityModel spatial;
    int hidden = 0;
    int classes = 0;
};

namespace detail {

inline ModalityModel make_modality_model(int inputDim, int hidden, int classes, std::uint64_t seed) {
    ModalityModel m;
    m.projection = Matrix(hidden, inputDim);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double s = 1.0 / std::sqrt(static_cast<double>(inputDim));
    for (double& x : m.projection.a) x = gauss(rng) * s;
    m.readout = Matrix(classes, hidden);
    m.bias.assign(classes, 0.0);
    return m;
}

inline void softmax_row(Matrix& m, int row) {
    double hi = -std::numeric_limits<double>::infinity();
    for (int c = 0; c < m.cols; ++c) hi = std::max(hi, m.at(row, c));
    double sum = 0.0;
    for (int c = 0; c < m.cols; ++c) {
        m.at(row, c) = std::exp(m.at(row, c) - hi);
        sum += m.at(row, c);
    }
    for (int c = 0; c < m.cols; ++c) m.at(row, c) /= sum;
}

// L2-normalized input -> random projection -> relu. Zero rows stay zero, so
// the readout bias alone decides those samples.
inline Matrix hidden_features(const Matrix& input, const ModalityModel& model) {
    if (input.cols != model.projection.cols)
        throw DimensionMismatch("input width " + std::to_string(input.cols) + " vs projection " +
                                std::to_string(model.projection.cols));
    const int hidden = model.projection.rows;
    Matrix h(input.rows, hidden);
    for (int r = 0; r < input.rows; ++r) {
        double norm = 0.0;
        for (int c = 0; c < input.cols; ++c) norm += input.at(r, c) * input.at(r, c);
        norm = std::sqrt(norm);
        const double inv = norm > 0.0 ? 1.0 / norm : 0.0;
        for (int j = 0; j < hidden; ++j) {
            double acc = 0.0;
            for (int c = 0; c < input.cols; ++c) acc += model.projection.at(j, c) * input.at(r, c) * inv;
            h.at(r, j) = std::max(0.0, acc);
        }
    }
    return h;
}

inline Matrix readout_rows(const Matrix& hidden, const ModalityModel& model, const Matrix& increment) {
    if (!increment.empty() && (increment.rows != model.readout.rows || increment.cols != model.readout.cols))
        throw DimensionMismatch("readout increment shape");
    const int classes = model.readout.rows;
    Matrix out(hidden.rows, classes);
    for (int r = 0; r < hidden.rows; ++r) {
        for (int c = 0; c < classes; ++c) {
            double acc = model.bias[c];
            for (int j = 0; j < hidden.cols; ++j) {
                double w = model.readout.at(c, j) + (increment.empty() ? 0.0 : increment.at(c, j));
                acc += w * hidden.at(r, j);
            }
            out.at(r, c) = acc;
        }
        softmax_row(out, r);
    }
    return out;
}

}  // namespace detail

inline DlModel make_dl_model(int temporalDim, int spatialDim, int hidden, int classes, std::uint64_t seed) {
    DlModel m;
    m.hidden = hidden;
    m.classes = classes;
    m.temporal = detail::make_modality_model(temporalDim, hidden, classes, stage_seed(seed, "dl.temporal", 0));
    m.spatial = detail::make_modality_model(spatialDim, hidden, classes, stage_seed(seed, "dl.spatial", 0));
    return m;
}

// saT: n x T densified temporal saliency; saS: n x (H*W) densified spatial
// saliency. ma/mv additively adjust the per-modality readouts; pass empty
// matrices for no adjustment. Optional hidden outputs feed the memory stage.
inline SenseFeatures stage_dl(const Matrix& saT, const Matrix& ma, const Matrix& saS, const Matrix& mv,
                              const DlModel& model, Matrix* hiddenT = nullptr, Matrix* hiddenS = nullptr) {
    SenseFeatures out;
    Matrix ht = detail::hidden_features(saT, model.temporal);
    Matrix hs = detail::hidden_features(saS, model.spatial);
    out.temporal = detail::readout_rows(ht, model.temporal, ma);
    out.spatial = detail::readout_rows(hs, model.spatial, mv);
    if (hiddenT) *hiddenT = std::move(ht);
    if (hiddenS) *hiddenS = std::move(hs);
    return out;
}

// ---------------------------------------------------------------------------
// CC: Bayes posterior fusion of sense features into topic vectors.

namespace detail {

inline std::vector<double> posterior_topic(const Matrix& senses, const std::vector<double>& increment,
                                           const std::vector<double>& prior, bool& degenerate) {
    const int classes = static_cast<int>(prior.size());
    if (senses.cols != classes) throw DimensionMismatch("sense feature width vs prior");
    std::vector<double> mean(classes, 0.0);
    for (int r = 0; r < senses.rows; ++r)
        for (int c = 0; c < classes; ++c) mean[c] += senses.at(r, c);
    if (senses.rows > 0)
        for (double& x : mean) x /= senses.rows;
    std::vector<double> post(classes, 0.0);
    double sum = 0.0;
    for (int c = 0; c < classes; ++c) {
        double inc = c < static_cast<int>(increment.size()) ? increment[c] : 0.0;
        post[c] = prior[c] * std::max(0.0, mean[c] + inc);
        sum += post[c];
    }
    if (sum <= 0.0) {
        degenerate = true;
        return prior;
    }
    degenerate = false;
    for (double& x : post) x /= sum;
    return post;
}

}  // namespace detail

inline PerceptFeatures stage_cc(const Matrix& fa, const std::vector<double>& mt, const Matrix& fv,
                                const std::vector<double>& ms, const std::vector<double>& prior) {
    PerceptFeatures out;
    out.temporalTopic = detail::posterior_topic(fa, mt, prior, out.degenerateTemporal);
    out.spatialTopic = detail::posterior_topic(fv, ms, prior, out.degenerateSpatial);
    return out;
}

// ---------------------------------------------------------------------------
// EL: weighted vote of four experts with AdaBoost-style weights.

inline double adaboost_alpha(double error) {
    const double e = std::clamp(error, 1e-6, 1.0 - 1e-6);
    return 0.5 * std::log((1.0 - e) / e);
}

namespace detail {

inline int argmax_tiebreak_low(const std::vector<double>& v) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(v.size()); ++i)
        if (v[i] > v[best]) best = i;
    return best;
}

inline std::vector<double> mean_row(const Matrix& m) {
    std::vector<double> out(m.cols, 0.0);
    for (int r = 0; r < m.rows; ++r)
        for (int c = 0; c < m.cols; ++c) out[c] += m.at(r, c);
    if (m.rows > 0)
        for (double& x : out) x /= m.rows;
    return out;
}

}  // namespace detail

// Experts vote in order: argmax Ct, argmax Cs, argmax mean Fa row, argmax
// mean Fv row. Class ties break toward the smaller index.
inline SemanticDecision stage_el(const std::vector<double>& ct, const std::vector<double>& cs, const Matrix& fa,
                                 const Matrix& fv, const std::array<double, 4>& weights) {
    double total = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw StageError("expert weights must be non-negative");
        total += w;
    }
    if (total <= 0.0) throw NoExperts();
    const int classes = static_cast<int>(ct.size());
    std::array<int, 4> votes = {detail::argmax_tiebreak_low(ct), detail::argmax_tiebreak_low(cs),
                                detail::argmax_tiebreak_low(detail::mean_row(fa)),
                                detail::argmax_tiebreak_low(detail::mean_row(fv))};
    SemanticDecision out;
    out.classMass.assign(classes, 0.0);
    for (int j = 0; j < 4; ++j) out.classMass[votes[j]] += weights[j] / total;
    out.label = detail::argmax_tiebreak_low(out.classMass);
    out.score = out.classMass[out.label];
    return out;
}

// ---------------------------------------------------------------------------
// RL: scalar error feedback.

struct RlConfig {
    double lambdaS = 0.5;
    double lambdaI = 1.0;
};

struct RlFeedback {
    double error = 0.0;  // in [0, 1]
    double es = 0.0;
    double ei = 0.0;
};

// error = 1 - (weight mass the ensemble placed on the expected class), so a
// unanimous correct decision scores 0 and a unanimous wrong one scores 1.
inline RlFeedback stage_rl(const SemanticDecision& cp, int expected, const RlConfig& cfg = RlConfig{}) {
    if (expected < 0 || expected >= static_cast<int>(cp.classMass.size()))
        throw StageError("expected label outside the class set");
    RlFeedback out;
    out.error = std::clamp(1.0 - cp.classMass[expected], 0.0, 1.0);
    out.es = cfg.lambdaS * out.error;
    out.ei = cfg.lambdaI * out.error;
    return out;
}

// ---------------------------------------------------------------------------
// IL: per-class EMA memory with accept-if-improved increments.

struct ClassStats {
    std::vector<double> faRow, fvRow;          // classes
    std::vector<double> ct, cs;                // classes
    Matrix readoutCorrT, readoutCorrS;         // classes x hidden
    std::vector<double> topicCorrT, topicCorrS;  // classes
    std::vector<double> attention;             // T
};

struct MemoryBuffer {
    std::map<int, ClassStats> perClass;
    double lastError = std::numeric_limits<double>::infinity();
};

namespace detail {

inline void ema_vec(std::vector<double>& stat, const std::vector<double>& obs, double rate,
                    std::vector<double>& delta) {
    if (stat.size() != obs.size()) stat.assign(obs.size(), 0.0);
    if (delta.size() != obs.size()) delta.assign(obs.size(), 0.0);
    for (std::size_t i = 0; i < obs.size(); ++i) {
        double d = rate * (obs[i] - stat[i]);
        stat[i] += d;
        delta[i] += d;
    }
}

inline void ema_mat(Matrix& stat, const Matrix& obs, double rate, Matrix& delta) {
    if (stat.rows != obs.rows || stat.cols != obs.cols) stat = Matrix(obs.rows, obs.cols);
    if (delta.rows != obs.rows || delta.cols != obs.cols) delta = Matrix(obs.rows, obs.cols);
    for (std::size_t i = 0; i < obs.a.size(); ++i) {
        double d = rate * (obs.a[i] - stat.a[i]);
        stat.a[i] += d;
        delta.a[i] += d;
    }
}

}  // namespace detail

// Updates every stat by stat += rate * (obs - stat) with rate = eta * Ei and
// returns the summed deltas, shaped for each consumer. Ei = 0 leaves the
// history untouched and every increment zero.
inline FeedbackBundle stage_il(double ei, const std::map<int, ClassStats>& observations, MemoryBuffer& history,
                               double eta) {
    FeedbackBundle out;
    out.ei = ei;
    const double rate = eta * ei;
    std::vector<double> mpT, mpS;
    for (const auto& [cls, obs] : observations) {
        ClassStats& stat = history.perClass[cls];
        std::vector<double> dCt, dCs;
        detail::ema_vec(stat.faRow, obs.faRow, rate, dCt);  // reuse scratch per stat
        dCt.clear();
        detail::ema_vec(stat.fvRow, obs.fvRow, rate, dCt);
        dCt.clear();
        detail::ema_vec(stat.ct, obs.ct, rate, dCt);
        detail::ema_vec(stat.cs, obs.cs, rate, dCs);
        detail::ema_vec(stat.topicCorrT, obs.topicCorrT, rate, out.mt);
        detail::ema_vec(stat.topicCorrS, obs.topicCorrS, rate, out.ms);
        detail::ema_vec(stat.attention, obs.attention, rate, out.mn);
        detail::ema_mat(stat.readoutCorrT, obs.readoutCorrT, rate, out.ma);
        detail::ema_mat(stat.readoutCorrS, obs.readoutCorrS, rate, out.mv);
        if (mpT.size() != dCt.size()) mpT.assign(dCt.size(), 0.0);
        if (mpS.size() != dCs.size()) mpS.assign(dCs.size(), 0.0);
        for (std::size_t i = 0; i < dCt.size(); ++i) mpT[i] += dCt[i];
        for (std::size_t i = 0; i < dCs.size(); ++i) mpS[i] += dCs[i];
    }
    out.mp = mpT;
    out.mp.insert(out.mp.end(), mpS.begin(), mpS.end());
    return out;
}

// Zeroes increments that would raise the last measured error.
inline bool accept_if_improved(FeedbackBundle& bundle, double candidateError, double lastError) {
    if (candidateError > lastError) {
        bundle.zero();
        return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Synthetic cross-modal dataset.

inline constexpr int kSpatialSize = 8;
inline constexpr int kTemporalSize = 32;

// Class templates: a 2x2 unit block at a class-specific grid position, and a
// class-specific tone. Pairwise distinct by construction.
inline MediaSample class_template(int cls) {
    MediaSample s;
    s.label = cls;
    s.spatial = Matrix(kSpatialSize, kSpatialSize);
    int r = 1 + 2 * (cls % 3);
    int c = 1 + 2 * ((cls / 3) % 3);
    double amp = 1.0 + 0.25 * (cls / 9);
    for (int dr = 0; dr < 2; ++dr)
        for (int dc = 0; dc < 2; ++dc) s.spatial.at(r + dr, c + dc) = amp;
    s.temporal.assign(kTemporalSize, 0.0);
    for (int t = 0; t < kTemporalSize; ++t)
        s.temporal[t] = amp * std::sin(2.0 * 3.141592653589793 * (cls + 1) * t / kTemporalSize);
    return s;
}

inline std::vector<MediaSample> gen_synthetic_dataset(std::uint64_t seed, int nSamples, int nClasses, double noise) {
    if (nClasses < 2) throw StageError("need at least two classes");
    if (nSamples < nClasses) throw StageError("need at least one sample per class");
    std::vector<MediaSample> templates;
    for (int k = 0; k < nClasses; ++k) templates.push_back(class_template(k));
    std::mt19937_64 rng(stage_seed(seed, "dataset", 0));
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<MediaSample> out;
    out.reserve(nSamples);
    for (int i = 0; i < nSamples; ++i) {
        MediaSample s = templates[i % nClasses];
        for (double& x : s.spatial.a) x += noise * gauss(rng);
        for (double& x : s.temporal) x += noise * gauss(rng);
        out.push_back(std::move(s));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Dataset export: one little-endian binary record per sample plus a JSON
// manifest. Record layout: int64 H, W, T, label, then H*W spatial doubles
// row-major, then T temporal doubles.

namespace detail {

template <typename T>
void write_le(std::ostream& os, T value) {
    unsigned char buf[sizeof(T)];
    std::uint64_t bits;
    std::memcpy(&bits, &value, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<unsigned char>(bits >> (8 * i));
    os.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T read_le(std::istream& is) {
    unsigned char buf[sizeof(T)];
    is.read(reinterpret_cast<char*>(buf), sizeof(T));
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    T value;
    std::memcpy(&value, &bits, sizeof(T));
    return value;
}

}  // namespace detail

inline void write_dataset(const std::filesystem::path& dir, const std::vector<MediaSample>& samples) {
    std::filesystem::create_directories(dir);
    nlohmann::ordered_json manifest;
    manifest["count"] = samples.size();
    manifest["files"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const MediaSample& s = samples[i];
        std::string name = "sample_" + std::to_string(i) + ".bin";
        std::ofstream os(dir / name, std::ios::binary);
        detail::write_le<std::int64_t>(os, s.spatial.rows);
        detail::write_le<std::int64_t>(os, s.spatial.cols);
        detail::write_le<std::int64_t>(os, static_cast<std::int64_t>(s.temporal.size()));
        detail::write_le<std::int64_t>(os, s.label);
        for (double x : s.spatial.a) detail::write_le<double>(os, x);
        for (double x : s.temporal) detail::write_le<double>(os, x);
        manifest["files"].push_back(name);
    }
    std::ofstream ms(dir / "manifest.json");
    ms << manifest.dump(2) << "\n";
}

inline std::vector<MediaSample> read_dataset(const std::filesystem::path& dir) {
    std::ifstream ms(dir / "manifest.json");
    if (!ms) throw StageError("cannot open dataset manifest");
    nlohmann::ordered_json manifest = nlohmann::ordered_json::parse(ms);
    std::vector<MediaSample> out;
    for (const auto& name : manifest["files"]) {
        std::ifstream is(dir / name.get<std::string>(), std::ios::binary);
        if (!is) throw StageError("cannot open dataset record " + name.get<std::string>());
        MediaSample s;
        auto h = detail::read_le<std::int64_t>(is);
        auto w = detail::read_le<std::int64_t>(is);
        auto t = detail::read_le<std::int64_t>(is);
        s.label = static_cast<int>(detail::read_le<std::int64_t>(is));
        s.spatial = Matrix(static_cast<int>(h), static_cast<int>(w));
        for (double& x : s.spatial.a) x = detail::read_le<double>(is);
        s.temporal.resize(static_cast<std::size_t>(t));
        for (double& x : s.temporal) x = detail::read_le<double>(is);
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace cham::stages
