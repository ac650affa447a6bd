#pragma once

#include <map>
#include <string>
#include <vector>

#include "voxmask/audio.hpp"

namespace voxmask {

enum class EmbeddingSource { kOriginal, kAnonymized };

struct SpeakerEmbedding {
    std::string utterance_id;
    std::vector<double> vector;
    EmbeddingSource source = EmbeddingSource::kOriginal;
};

// Embeddings for both sides of the verification protocol: enrollment
// vectors come from original audio, test vectors from anonymized audio.
struct EmbeddingTable {
    std::map<std::string, std::vector<double>> original;
    std::map<std::string, std::vector<double>> anonymized;
};

struct Trial {
    std::string enroll_id;  // original-audio utterance
    std::string test_id;    // anonymized-audio utterance
    bool is_same_speaker = false;
};

struct TrialSet {
    std::vector<Trial> trials;
    int genuine_count() const;
    int impostor_count() const;
};

struct ScoreSet {
    std::vector<double> genuine_scores;
    std::vector<double> impostor_scores;
};

struct TrialRecord {
    std::string id;
    std::string speaker_id;
};

// Builds the verification trial list: one enrollment utterance per speaker
// (first in manifest order); genuine trials pair it with every anonymized
// utterance of the same speaker, impostor trials with up to
// max_impostor_per_enroll different-speaker utterances sampled
// deterministically from the seed. Throws when fewer than two speakers
// are present.
TrialSet build_trials(const std::vector<TrialRecord>& records, int max_impostor_per_enroll,
                      std::uint64_t seed);

// Cosine similarity of enroll (original) and test (anonymized) vectors.
// Throws when an id cannot be resolved in its table.
ScoreSet score_trials(const TrialSet& trials, const EmbeddingTable& embeddings);

struct EerResult {
    double eer = 0.0;
    double threshold = 0.0;
};

// Equal error rate by threshold sweep over midpoints of the sorted pooled
// scores, with FRR(t) = P(genuine < t) and FAR(t) = P(impostor >= t);
// linear interpolation between the two sweep points where FAR-FRR changes
// sign. Both score partitions must be non-empty.
EerResult compute_eer(const ScoreSet& scores);

// Built-in lightweight speaker representation: 20 frame-averaged MFCCs
// (c1..c20, log-energy term dropped), mean-centered. Requires at least
// 0.5 s of audio and a non-silent clip.
SpeakerEmbedding mfcc_mean_embedding(const AudioClip& clip,
                                     EmbeddingSource source = EmbeddingSource::kOriginal);

// CSV with header `id,dim0..dimN`, or raw float32 rows with a sidecar
// index (see load_embedding_rows for the sidecar format).
std::map<std::string, std::vector<double>> load_embedding_rows(const std::string& path);
void write_embedding_csv(const std::map<std::string, std::vector<double>>& rows,
                         const std::string& path);

// Score import: CSV `enroll_id,test_id,label,score` where label is
// genuine/impostor (or 1/0 and target/nontarget).
ScoreSet load_score_csv(const std::string& path);

void write_trials_csv(const TrialSet& trials, const std::string& path);

}  // namespace voxmask
