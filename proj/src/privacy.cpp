#include "voxmask/privacy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <stdexcept>

#include "voxmask/dsp.hpp"
#include "voxmask/manifest.hpp"

namespace voxmask {

int TrialSet::genuine_count() const {
    return static_cast<int>(
        std::count_if(trials.begin(), trials.end(), [](const Trial& t) { return t.is_same_speaker; }));
}

int TrialSet::impostor_count() const {
    return static_cast<int>(trials.size()) - genuine_count();
}

TrialSet build_trials(const std::vector<TrialRecord>& records, int max_impostor_per_enroll,
                      std::uint64_t seed) {
    // one enrollment per speaker: its first utterance in manifest order
    std::vector<std::string> speaker_order;
    std::map<std::string, std::vector<std::string>> by_speaker;
    for (const auto& rec : records) {
        auto [it, inserted] = by_speaker.try_emplace(rec.speaker_id);
        if (inserted) speaker_order.push_back(rec.speaker_id);
        it->second.push_back(rec.id);
    }
    if (speaker_order.size() < 2)
        throw std::invalid_argument("trial construction needs at least two speakers, got " +
                                    std::to_string(speaker_order.size()));

    TrialSet set;
    std::mt19937_64 rng(seed);
    for (const auto& speaker : speaker_order) {
        const std::string& enroll = by_speaker[speaker].front();
        for (const auto& utt : by_speaker[speaker])
            set.trials.push_back({enroll, utt, true});

        std::vector<std::string> others;
        for (const auto& other : speaker_order) {
            if (other == speaker) continue;
            for (const auto& utt : by_speaker[other])
                if (utt != enroll) others.push_back(utt);
        }
        std::shuffle(others.begin(), others.end(), rng);
        const std::size_t take =
            std::min<std::size_t>(others.size(), std::max(0, max_impostor_per_enroll));
        for (std::size_t i = 0; i < take; ++i)
            set.trials.push_back({enroll, others[i], false});
    }
    return set;
}

ScoreSet score_trials(const TrialSet& trials, const EmbeddingTable& embeddings) {
    ScoreSet scores;
    for (const auto& trial : trials.trials) {
        const auto enroll = embeddings.original.find(trial.enroll_id);
        if (enroll == embeddings.original.end())
            throw std::runtime_error("no original-side embedding for id '" + trial.enroll_id + "'");
        const auto test = embeddings.anonymized.find(trial.test_id);
        if (test == embeddings.anonymized.end())
            throw std::runtime_error("no anonymized-side embedding for id '" + trial.test_id + "'");
        const double score = cosine_similarity(enroll->second, test->second);
        (trial.is_same_speaker ? scores.genuine_scores : scores.impostor_scores).push_back(score);
    }
    return scores;
}

EerResult compute_eer(const ScoreSet& scores) {
    const auto& gen = scores.genuine_scores;
    const auto& imp = scores.impostor_scores;
    if (gen.empty() || imp.empty())
        throw std::invalid_argument("EER needs non-empty genuine and impostor score sets");

    std::vector<double> pooled;
    pooled.reserve(gen.size() + imp.size());
    pooled.insert(pooled.end(), gen.begin(), gen.end());
    pooled.insert(pooled.end(), imp.begin(), imp.end());
    std::sort(pooled.begin(), pooled.end());

    // candidate thresholds: midpoints of adjacent pooled scores, plus
    // sentinels below and above everything so the crossing always exists
    std::vector<double> thresholds;
    thresholds.push_back(pooled.front() - 1.0);
    for (std::size_t i = 0; i + 1 < pooled.size(); ++i)
        thresholds.push_back(0.5 * (pooled[i] + pooled[i + 1]));
    thresholds.push_back(pooled.back() + 1.0);

    std::vector<double> gen_sorted(gen), imp_sorted(imp);
    std::sort(gen_sorted.begin(), gen_sorted.end());
    std::sort(imp_sorted.begin(), imp_sorted.end());

    auto frr_at = [&](double t) {
        const auto below = std::lower_bound(gen_sorted.begin(), gen_sorted.end(), t);
        return static_cast<double>(below - gen_sorted.begin()) / gen_sorted.size();
    };
    auto far_at = [&](double t) {
        const auto below = std::lower_bound(imp_sorted.begin(), imp_sorted.end(), t);
        return static_cast<double>(imp_sorted.end() - below) / imp_sorted.size();
    };

    double prev_t = thresholds.front();
    double prev_far = far_at(prev_t), prev_frr = frr_at(prev_t);
    for (std::size_t i = 1; i < thresholds.size(); ++i) {
        const double t = thresholds[i];
        const double far = far_at(t), frr = frr_at(t);
        const double diff = far - frr;
        if (diff == 0.0) return {0.5 * (far + frr), t};
        if (diff < 0.0) {
            // FAR-FRR changed sign between the previous threshold and this
            // one; interpolate both rates linearly and take the crossing
            const double d0 = prev_far - prev_frr;
            const double d1 = far - frr;
            const double lambda = d0 / (d0 - d1);
            const double eer = prev_far + lambda * (far - prev_far);
            return {eer, prev_t + lambda * (t - prev_t)};
        }
        prev_t = t;
        prev_far = far;
        prev_frr = frr;
    }
    // not reachable: the sentinel thresholds bracket a sign change
    return {0.5, thresholds.back()};
}

SpeakerEmbedding mfcc_mean_embedding(const AudioClip& clip, EmbeddingSource source) {
    validate_clip(clip);
    if (clip.duration_seconds() < 0.5)
        throw std::invalid_argument("embedding needs at least 0.5 s of audio, got " +
                                    std::to_string(clip.duration_seconds()) + " s for '" +
                                    clip.id + "'");
    SpeakerEmbedding emb;
    emb.utterance_id = clip.id;
    emb.source = source;
    emb.vector = mean_mfcc(clip.samples, clip.sample_rate, 20);

    double mean = 0.0;
    for (double v : emb.vector) mean += v;
    mean /= emb.vector.size();
    double norm = 0.0;
    for (auto& v : emb.vector) {
        v -= mean;
        norm += v * v;
    }
    if (norm <= 1e-20)
        throw std::runtime_error("embedding for '" + clip.id + "' is degenerate (silent clip?)");
    return emb;
}

std::map<std::string, std::vector<double>> load_embedding_rows(const std::string& path) {
    std::map<std::string, std::vector<double>> rows;
    if (path.size() > 4 && path.substr(path.size() - 4) == ".f32") {
        // raw float32 rows; sidecar <path>.idx: first line dim, then ids in row order
        std::ifstream idx(path + ".idx");
        if (!idx) throw std::runtime_error("missing sidecar index " + path + ".idx");
        std::size_t dim = 0;
        idx >> dim;
        if (dim == 0) throw std::runtime_error("sidecar " + path + ".idx has no dimension line");
        std::vector<std::string> ids;
        for (std::string id; idx >> id;) ids.push_back(id);

        std::ifstream data(path, std::ios::binary);
        if (!data) throw std::runtime_error("cannot open " + path);
        std::vector<float> row(dim);
        for (const auto& id : ids) {
            data.read(reinterpret_cast<char*>(row.data()), dim * sizeof(float));
            if (!data) throw std::runtime_error(path + ": truncated row for id '" + id + "'");
            rows[id] = std::vector<double>(row.begin(), row.end());
        }
        return rows;
    }

    const auto cells = read_csv(path);
    if (cells.empty()) throw std::runtime_error(path + ": empty embedding table");
    for (std::size_t line = 1; line < cells.size(); ++line) {
        const auto& row = cells[line];
        if (row.size() < 2)
            throw std::runtime_error(path + ": line " + std::to_string(line + 1) +
                                     ": expected id plus at least one dimension");
        std::vector<double> vec(row.size() - 1);
        for (std::size_t i = 1; i < row.size(); ++i) vec[i - 1] = std::stod(row[i]);
        if (!rows.emplace(row[0], std::move(vec)).second)
            throw std::runtime_error(path + ": duplicate embedding id '" + row[0] + "'");
    }
    return rows;
}

void write_embedding_csv(const std::map<std::string, std::vector<double>>& rows,
                         const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    if (rows.empty()) {
        out << "id\n";
        return;
    }
    out << "id";
    for (std::size_t i = 0; i < rows.begin()->second.size(); ++i) out << ",dim" << i;
    out << "\n";
    out.precision(10);
    for (const auto& [id, vec] : rows) {
        out << id;
        for (double v : vec) out << ',' << v;
        out << "\n";
    }
}

ScoreSet load_score_csv(const std::string& path) {
    const auto cells = read_csv(path);
    ScoreSet scores;
    for (std::size_t line = 0; line < cells.size(); ++line) {
        const auto& row = cells[line];
        if (line == 0 && !row.empty() && row[0] == "enroll_id") continue;  // header
        if (row.size() < 4)
            throw std::runtime_error(path + ": line " + std::to_string(line + 1) +
                                     ": expected enroll_id,test_id,label,score");
        const std::string& label = row[2];
        const double score = std::stod(row[3]);
        if (label == "genuine" || label == "target" || label == "1")
            scores.genuine_scores.push_back(score);
        else if (label == "impostor" || label == "nontarget" || label == "0")
            scores.impostor_scores.push_back(score);
        else
            throw std::runtime_error(path + ": line " + std::to_string(line + 1) +
                                     ": unknown trial label '" + label + "'");
    }
    return scores;
}

void write_trials_csv(const TrialSet& trials, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << "enroll_id,test_id,label\n";
    for (const auto& t : trials.trials)
        out << t.enroll_id << ',' << t.test_id << ',' << (t.is_same_speaker ? "genuine" : "impostor")
            << "\n";
}

}  // namespace voxmask
