#include "voxmask/utility.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "voxmask/manifest.hpp"

namespace voxmask {

namespace {

// Decodes UTF-8 leniently: malformed bytes fall back to their Latin-1 value.
std::vector<char32_t> decode_utf8(const std::string& text) {
    std::vector<char32_t> out;
    std::size_t i = 0;
    while (i < text.size()) {
        const unsigned char b = text[i];
        int extra = 0;
        char32_t cp = b;
        if (b >= 0xF0)
            extra = 3, cp = b & 0x07;
        else if (b >= 0xE0)
            extra = 2, cp = b & 0x0F;
        else if (b >= 0xC0)
            extra = 1, cp = b & 0x1F;
        if (extra > 0 && i + extra < text.size()) {
            bool valid = true;
            char32_t acc = cp;
            for (int k = 1; k <= extra; ++k) {
                const unsigned char c = text[i + k];
                if ((c & 0xC0) != 0x80) {
                    valid = false;
                    break;
                }
                acc = (acc << 6) | (c & 0x3F);
            }
            if (valid) {
                out.push_back(acc);
                i += extra + 1;
                continue;
            }
        }
        out.push_back(b);
        ++i;
    }
    return out;
}

bool is_dropped(char32_t cp) {
    if (cp < 0x80)
        return std::isspace(static_cast<int>(cp)) || std::ispunct(static_cast<int>(cp));
    if (cp >= 0x2000 && cp <= 0x206F) return true;   // general punctuation and spaces
    if (cp >= 0x3000 && cp <= 0x303F) return true;   // CJK symbols and punctuation
    if (cp >= 0xFF01 && cp <= 0xFF0F) return true;   // fullwidth punctuation blocks
    if (cp >= 0xFF1A && cp <= 0xFF20) return true;
    if (cp >= 0xFF3B && cp <= 0xFF40) return true;
    if (cp >= 0xFF5B && cp <= 0xFF65) return true;
    return false;
}

}  // namespace

std::vector<char32_t> normalize_transcript(const std::string& text) {
    std::vector<char32_t> out;
    for (char32_t cp : decode_utf8(text)) {
        if (is_dropped(cp)) continue;
        if (cp >= 'A' && cp <= 'Z') cp += 'a' - 'A';
        out.push_back(cp);
    }
    return out;
}

std::size_t edit_distance(const std::vector<char32_t>& a, const std::vector<char32_t>& b) {
    const std::size_t n = a.size(), m = b.size();
    std::vector<std::size_t> prev(m + 1), cur(m + 1);
    for (std::size_t j = 0; j <= m; ++j) prev[j] = j;
    for (std::size_t i = 1; i <= n; ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= m; ++j) {
            const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

double cer(const std::string& reference, const std::string& hypothesis) {
    const auto ref = normalize_transcript(reference);
    const auto hyp = normalize_transcript(hypothesis);
    if (ref.empty())
        throw std::invalid_argument("CER is undefined for an empty reference transcript");
    return static_cast<double>(edit_distance(ref, hyp)) / static_cast<double>(ref.size());
}

double emotion_similarity(const EmotionEmbeddingPair& pair) {
    if (pair.original_vector.size() != pair.anonymized_vector.size())
        throw std::invalid_argument("emotion embeddings for '" + pair.utterance_id +
                                    "' have mismatched dimensions");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < pair.original_vector.size(); ++i) {
        dot += pair.original_vector[i] * pair.anonymized_vector[i];
        na += pair.original_vector[i] * pair.original_vector[i];
        nb += pair.anonymized_vector[i] * pair.anonymized_vector[i];
    }
    if (na == 0.0 || nb == 0.0)
        throw std::invalid_argument("emotion embedding for '" + pair.utterance_id +
                                    "' is a zero vector");
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

SnrEstimate estimate_snr(const AudioClip& clip) {
    validate_clip(clip);
    if (clip.duration_seconds() < 0.5)
        throw std::invalid_argument("SNR estimate needs at least 0.5 s of audio");

    const int frame = clip.sample_rate * 25 / 1000;
    const int hop = clip.sample_rate * 10 / 1000;
    std::vector<double> energies;
    for (std::size_t start = 0; start + frame <= clip.samples.size(); start += hop) {
        double e = 0.0;
        for (int n = 0; n < frame; ++n) e += clip.samples[start + n] * clip.samples[start + n];
        energies.push_back(e / frame);
    }

    std::vector<double> sorted(energies);
    std::sort(sorted.begin(), sorted.end());
    const std::size_t decile = std::max<std::size_t>(1, sorted.size() / 10);

    double noise = 0.0;
    for (std::size_t i = 0; i < decile; ++i) noise += sorted[i];
    noise /= decile;

    SnrEstimate est;
    if (sorted.back() <= 0.0) {
        est.db = 100.0;
        est.silent = true;
        return est;
    }
    if (noise <= 0.0) {
        est.db = 100.0;
        return est;
    }

    // activity threshold 6 dB over the noise floor; fall back to the top
    // decile when nothing clears it (noise-like input)
    const double threshold = 4.0 * noise;
    double signal = 0.0;
    std::size_t active = 0;
    for (double e : energies)
        if (e >= threshold) {
            signal += e;
            ++active;
        }
    if (active == 0) {
        for (std::size_t i = sorted.size() - decile; i < sorted.size(); ++i) signal += sorted[i];
        active = decile;
    }
    signal /= active;

    est.db = std::clamp(10.0 * std::log10(signal / noise), -20.0, 100.0);
    return est;
}

PredictionSet ensemble_average(const PredictionSet& a, const PredictionSet& b) {
    std::vector<std::string> missing;
    for (const auto& [id, _] : a.items)
        if (!b.items.count(id)) missing.push_back(id + " (only in first set)");
    for (const auto& [id, _] : b.items)
        if (!a.items.count(id)) missing.push_back(id + " (only in second set)");
    if (!missing.empty()) {
        std::string msg = "prediction id sets differ:";
        for (const auto& m : missing) msg += " " + m;
        throw std::invalid_argument(msg);
    }

    PredictionSet out;
    for (const auto& [id, pa] : a.items) {
        const auto& pb = b.items.at(id);
        Prediction merged;
        merged.probability = 0.5 * (pa.probability + pb.probability);
        merged.true_label = pa.true_label ? pa.true_label : pb.true_label;
        if (pa.true_label && pb.true_label && *pa.true_label != *pb.true_label)
            throw std::invalid_argument("conflicting labels for id '" + id + "'");
        out.items.emplace(id, merged);
    }
    return out;
}

double accuracy(const PredictionSet& preds, double threshold) {
    if (preds.items.empty()) throw std::invalid_argument("accuracy of an empty prediction set");
    std::size_t correct = 0;
    for (const auto& [id, p] : preds.items) {
        if (!p.true_label)
            throw std::invalid_argument("prediction for id '" + id + "' carries no label");
        const int decided = p.probability >= threshold ? 1 : 0;
        if (decided == *p.true_label) ++correct;
    }
    return static_cast<double>(correct) / preds.items.size();
}

std::map<std::string, std::string> load_transcript_tsv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open transcript file " + path);
    std::map<std::string, std::string> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw std::runtime_error(path + ": line " + std::to_string(lineno) +
                                     ": expected id<TAB>text");
        out[line.substr(0, tab)] = line.substr(tab + 1);
    }
    return out;
}

PredictionSet load_prediction_csv(const std::string& path) {
    const auto cells = read_csv(path);
    PredictionSet out;
    for (std::size_t line = 0; line < cells.size(); ++line) {
        const auto& row = cells[line];
        if (line == 0 && !row.empty() && row[0] == "id") continue;  // header
        if (row.size() < 2)
            throw std::runtime_error(path + ": line " + std::to_string(line + 1) +
                                     ": expected id,probability[,label]");
        Prediction p;
        p.probability = std::stod(row[1]);
        if (p.probability < 0.0 || p.probability > 1.0)
            throw std::runtime_error(path + ": line " + std::to_string(line + 1) +
                                     ": probability outside [0, 1]");
        if (row.size() >= 3 && !row[2].empty()) {
            const int label = std::stoi(row[2]);
            if (label != 0 && label != 1)
                throw std::runtime_error(path + ": line " + std::to_string(line + 1) +
                                         ": label must be 0 or 1");
            p.true_label = label;
        }
        if (!out.items.emplace(row[0], p).second)
            throw std::runtime_error(path + ": duplicate prediction id '" + row[0] + "'");
    }
    return out;
}

std::map<std::string, double> load_score_column_csv(const std::string& path) {
    const auto cells = read_csv(path);
    std::map<std::string, double> out;
    for (std::size_t line = 0; line < cells.size(); ++line) {
        const auto& row = cells[line];
        if (line == 0 && !row.empty() && row[0] == "id") continue;
        if (row.size() < 2)
            throw std::runtime_error(path + ": line " + std::to_string(line + 1) +
                                     ": expected id,score");
        out[row[0]] = std::stod(row[1]);
    }
    return out;
}

}  // namespace voxmask
