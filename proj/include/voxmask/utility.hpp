#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "voxmask/audio.hpp"

namespace voxmask {

// Character error rate: unit-cost Levenshtein distance over normalized
// code points divided by the normalized reference length. Normalization
// decodes UTF-8, drops whitespace and punctuation (ASCII and common CJK
// blocks) and folds ASCII case. Throws when the normalized reference is
// empty.
double cer(const std::string& reference, const std::string& hypothesis);

// Normalized code-point sequence used by cer(); exposed for tests.
std::vector<char32_t> normalize_transcript(const std::string& text);

std::size_t edit_distance(const std::vector<char32_t>& a, const std::vector<char32_t>& b);

struct EmotionEmbeddingPair {
    std::string utterance_id;
    std::vector<double> original_vector;
    std::vector<double> anonymized_vector;
};

// Cosine of the two emotion vectors; throws on zero vectors or dimension
// mismatch.
double emotion_similarity(const EmotionEmbeddingPair& pair);

struct SnrEstimate {
    double db = 0.0;
    bool silent = false;  // whole clip was silent
};

// Blind SNR from 25 ms / 10 ms frame energies: the noise floor is the
// mean energy of the lowest-decile frames, the signal level the mean of
// frames above an activity threshold. Result clamped to [-20, 100] dB;
// a zero noise floor yields the 100 dB cap. Requires >= 0.5 s of audio.
SnrEstimate estimate_snr(const AudioClip& clip);

struct Prediction {
    double probability = 0.0;          // positive class, in [0, 1]
    std::optional<int> true_label;     // 0/1 when known
};

struct PredictionSet {
    // keyed by utterance id; insertion into std::map keeps file order
    // irrelevant and comparisons deterministic
    std::map<std::string, Prediction> items;
};

// Per-id probability average of two prediction sets. Labels are carried
// through (and must agree when present on both sides). Throws when the id
// sets differ, naming the offenders.
PredictionSet ensemble_average(const PredictionSet& a, const PredictionSet& b);

// Fraction of ids where (probability >= threshold) matches the true
// label. All records must carry labels.
double accuracy(const PredictionSet& preds, double threshold = 0.5);

// Two-column TSV `id<TAB>text`.
std::map<std::string, std::string> load_transcript_tsv(const std::string& path);

// CSV `id,probability[,label]`.
PredictionSet load_prediction_csv(const std::string& path);

// CSV `id,score` (e.g. externally computed per-utterance MOS).
std::map<std::string, double> load_score_column_csv(const std::string& path);

}  // namespace voxmask
