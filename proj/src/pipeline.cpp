#include "voxmask/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <stdexcept>
#include <thread>

#include "json.hpp"

#include "voxmask/f0.hpp"
#include "voxmask/privacy.hpp"
#include "voxmask/utility.hpp"

namespace voxmask {

namespace fs = std::filesystem;

namespace {

AnonymizeMethod parse_method(const std::string& token) {
    if (token == "pitch") return AnonymizeMethod::kPitch;
    if (token == "mcadams") return AnonymizeMethod::kMcadams;
    if (token == "external") return AnonymizeMethod::kExternal;
    throw std::invalid_argument("unknown anonymization method '" + token + "'");
}

GenderPolicy parse_policy(const std::string& token) {
    if (token.empty() || token == "raise_male_lower_female" || token == "gendered")
        return GenderPolicy::kRaiseMaleLowerFemale;
    if (token == "fixed_direction" || token == "fixed") return GenderPolicy::kFixedDirection;
    throw std::invalid_argument("unknown gender policy '" + token + "'");
}

PipelineConfig config_from_fields(const std::map<std::string, std::string>& fields,
                                  const std::string& where) {
    PipelineConfig config;
    auto get = [&](const char* key) -> std::string {
        const auto it = fields.find(key);
        return it == fields.end() ? "" : it->second;
    };
    try {
        const std::string method = get("method");
        if (method.empty()) throw std::invalid_argument("missing 'method'");
        config.anonymizer.method = parse_method(method);
        if (!get("name").empty()) config.anonymizer.name = get("name");
        if (!get("step").empty()) config.anonymizer.semitone_step = std::stod(get("step"));
        if (!get("lpc_order").empty()) config.anonymizer.lpc_order = std::stoi(get("lpc_order"));
        if (!get("alpha").empty()) config.anonymizer.mcadams_alpha = std::stod(get("alpha"));
        if (!get("backend_cmd").empty()) config.anonymizer.backend_command = get("backend_cmd");
        config.anonymizer.gender_policy = parse_policy(get("gender_policy"));
        if (!get("timeout").empty())
            config.anonymizer.backend_timeout_seconds = std::stod(get("timeout"));
        if (!get("mos_csv").empty()) config.mos_csv = get("mos_csv");
        if (!get("hyp_transcripts").empty()) config.hyp_transcript_tsv = get("hyp_transcripts");
        if (!get("emo_original").empty()) config.emotion_original_path = get("emo_original");
        if (!get("emo_anonymized").empty()) config.emotion_anonymized_path = get("emo_anonymized");
        if (!get("scores_csv").empty()) config.external_scores_csv = get("scores_csv");
        config.anonymizer.validate();
    } catch (const std::exception& e) {
        throw std::runtime_error(where + ": " + e.what());
    }
    return config;
}

bool has_suffix(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() &&
           s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

std::vector<PipelineConfig> load_config_grid(const std::string& path) {
    std::vector<PipelineConfig> configs;
    if (has_suffix(path, ".json")) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open config grid " + path);
        nlohmann::json doc;
        try {
            in >> doc;
        } catch (const nlohmann::json::parse_error& e) {
            throw std::runtime_error(path + ": invalid JSON: " + e.what());
        }
        if (!doc.is_array()) throw std::runtime_error(path + ": expected a JSON array of configs");
        std::size_t index = 0;
        for (const auto& entry : doc) {
            std::map<std::string, std::string> fields;
            for (const auto& [key, value] : entry.items()) {
                if (value.is_string())
                    fields[key] = value.get<std::string>();
                else if (value.is_number_integer())
                    fields[key] = std::to_string(value.get<long long>());
                else if (value.is_number())
                    fields[key] = std::to_string(value.get<double>());
                else
                    throw std::runtime_error(path + ": config " + std::to_string(index) +
                                             ": field '" + key + "' must be a string or number");
            }
            configs.push_back(
                config_from_fields(fields, path + ": config " + std::to_string(index)));
            ++index;
        }
    } else {
        const auto rows = read_csv(path);
        if (rows.size() < 2) throw std::runtime_error(path + ": config grid needs a header row");
        for (std::size_t r = 1; r < rows.size(); ++r) {
            std::map<std::string, std::string> fields;
            for (std::size_t c = 0; c < rows[0].size() && c < rows[r].size(); ++c)
                fields[rows[0][c]] = rows[r][c];
            configs.push_back(config_from_fields(fields, path + ": line " + std::to_string(r + 1)));
        }
    }
    if (configs.empty()) throw std::runtime_error(path + ": no configurations");
    return configs;
}

namespace {

struct UtteranceMetrics {
    bool ok = false;
    std::string error;
    std::optional<double> snr;
    std::optional<double> l1, pcc;
    std::optional<std::vector<double>> orig_embedding, anon_embedding;
};

struct MeanAccumulator {
    double sum = 0.0;
    int n = 0;
    void add(double v) {
        sum += v;
        ++n;
    }
    std::optional<double> mean() const {
        if (n == 0) return std::nullopt;
        return sum / n;
    }
};

void run_indexed(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
    const int n = std::max(1, std::min<int>(workers, static_cast<int>(count)));
    if (n == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < n; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
        });
    for (auto& t : pool) t.join();
}

}  // namespace

EvaluationReport run_pipeline(const std::vector<UtteranceRecord>& manifest,
                              const std::vector<PipelineConfig>& configs,
                              const std::string& out_dir, const PipelineOptions& options) {
    if (manifest.empty()) throw std::invalid_argument("run_pipeline: empty manifest");
    if (configs.empty()) throw std::invalid_argument("run_pipeline: no configurations");
    fs::create_directories(out_dir);

    EvaluationReport report;
    for (const auto& config_in : configs) {
        PipelineConfig config = config_in;
        config.anonymizer.validate();
        const std::string method_dir = (fs::path(out_dir) / config.anonymizer.name).string();

        std::vector<BatchRecord> batch_records(manifest.size());
        for (std::size_t i = 0; i < manifest.size(); ++i)
            batch_records[i] = {manifest[i].id, manifest[i].wav_path, manifest[i].gender};
        const auto batch =
            anonymize_batch(batch_records, config.anonymizer, method_dir, options.workers);

        const std::string contour_dir = (fs::path(out_dir) / "contours" / config.anonymizer.name).string();
        if (options.dump_contours) fs::create_directories(contour_dir);

        std::vector<UtteranceMetrics> metrics(manifest.size());
        run_indexed(manifest.size(), options.workers, [&](std::size_t i) {
            UtteranceMetrics& m = metrics[i];
            if (!batch[i].ok) {
                m.error = batch[i].error;
                return;
            }
            try {
                const AudioClip original = load_clip_canonical(manifest[i].wav_path, manifest[i].id);
                const AudioClip anonymized = read_wav(batch[i].output_path, manifest[i].id);

                const auto snr = estimate_snr(anonymized);
                m.snr = snr.db;

                const auto f0_orig = extract_f0(original);
                const auto f0_anon = extract_f0(anonymized);
                const auto dev = contour_deviation(f0_orig, f0_anon);
                if (dev.joint_voiced_count > 0) m.l1 = dev.l1;
                m.pcc = dev.pcc;
                if (options.dump_contours) {
                    write_contour_csv(f0_orig,
                                      (fs::path(contour_dir) / (manifest[i].id + ".orig.csv")).string());
                    write_contour_csv(f0_anon,
                                      (fs::path(contour_dir) / (manifest[i].id + ".anon.csv")).string());
                }

                try {
                    m.orig_embedding =
                        mfcc_mean_embedding(original, EmbeddingSource::kOriginal).vector;
                    m.anon_embedding =
                        mfcc_mean_embedding(anonymized, EmbeddingSource::kAnonymized).vector;
                } catch (const std::exception&) {
                    // too short or degenerate for speaker scoring; other
                    // metrics still stand
                }
                m.ok = true;
            } catch (const std::exception& e) {
                m.error = e.what();
            }
        });

        ReportRow row;
        row.method = config.anonymizer.name;
        row.utterances = static_cast<int>(manifest.size());

        MeanAccumulator snr_acc, l1_acc, pcc_acc, cer_acc, emo_acc, mos_acc;
        for (std::size_t i = 0; i < manifest.size(); ++i) {
            if (!metrics[i].ok) {
                ++row.failures;
                std::cerr << "[" << config.anonymizer.name << "] " << manifest[i].id
                          << " failed: " << metrics[i].error << "\n";
                continue;
            }
            if (metrics[i].snr) snr_acc.add(*metrics[i].snr);
            if (metrics[i].l1) l1_acc.add(*metrics[i].l1);
            if (metrics[i].pcc) pcc_acc.add(*metrics[i].pcc);
        }

        if (config.mos_csv) {
            const auto mos = load_score_column_csv(*config.mos_csv);
            for (const auto& rec : manifest) {
                const auto it = mos.find(rec.id);
                if (it != mos.end()) mos_acc.add(it->second);
            }
        }
        if (config.hyp_transcript_tsv) {
            const auto hyp = load_transcript_tsv(*config.hyp_transcript_tsv);
            for (std::size_t i = 0; i < manifest.size(); ++i) {
                if (!metrics[i].ok || !manifest[i].transcript) continue;
                const auto it = hyp.find(manifest[i].id);
                if (it == hyp.end()) continue;
                try {
                    cer_acc.add(cer(*manifest[i].transcript, it->second));
                } catch (const std::exception&) {
                    // empty normalized reference; skip
                }
            }
        }
        if (config.emotion_original_path && config.emotion_anonymized_path) {
            const auto orig = load_embedding_rows(*config.emotion_original_path);
            const auto anon = load_embedding_rows(*config.emotion_anonymized_path);
            for (const auto& rec : manifest) {
                const auto a = orig.find(rec.id);
                const auto b = anon.find(rec.id);
                if (a == orig.end() || b == anon.end()) continue;
                emo_acc.add(emotion_similarity({rec.id, a->second, b->second}));
            }
        }

        // corpus-level EER: external scores when provided, otherwise the
        // built-in embedding extractor over successful utterances
        try {
            if (config.external_scores_csv) {
                row.eer = compute_eer(load_score_csv(*config.external_scores_csv)).eer;
            } else {
                EmbeddingTable table;
                std::vector<TrialRecord> trial_records;
                for (std::size_t i = 0; i < manifest.size(); ++i) {
                    if (!metrics[i].ok || !metrics[i].orig_embedding || !metrics[i].anon_embedding)
                        continue;
                    table.original[manifest[i].id] = *metrics[i].orig_embedding;
                    table.anonymized[manifest[i].id] = *metrics[i].anon_embedding;
                    trial_records.push_back({manifest[i].id, manifest[i].speaker_id});
                }
                const auto trials =
                    build_trials(trial_records, options.max_impostor_per_enroll, options.seed);
                row.eer = compute_eer(score_trials(trials, table)).eer;
            }
        } catch (const std::exception& e) {
            std::cerr << "[" << config.anonymizer.name << "] EER unavailable: " << e.what() << "\n";
        }

        row.snr = snr_acc.mean();
        row.snr_n = snr_acc.n;
        row.l1_f0 = l1_acc.mean();
        row.pcc_f0 = pcc_acc.mean();
        row.f0_n = l1_acc.n;
        row.cer = cer_acc.mean();
        row.cer_n = cer_acc.n;
        row.emo = emo_acc.mean();
        row.emo_n = emo_acc.n;
        row.mos = mos_acc.mean();
        row.mos_n = mos_acc.n;
        report.rows.push_back(std::move(row));
    }
    return report;
}

EnsembleSummary ensemble_command(const std::string& pred_file_a, const std::string& pred_file_b,
                                 const std::optional<std::string>& labels_csv) {
    PredictionSet a = load_prediction_csv(pred_file_a);
    PredictionSet b = load_prediction_csv(pred_file_b);
    if (labels_csv) {
        const auto labels = load_score_column_csv(*labels_csv);
        for (auto* set : {&a, &b})
            for (auto& [id, pred] : set->items) {
                const auto it = labels.find(id);
                if (it != labels.end()) pred.true_label = static_cast<int>(it->second);
            }
    }
    EnsembleSummary summary;
    summary.accuracy_a = accuracy(a);
    summary.accuracy_b = accuracy(b);
    summary.accuracy_ensemble = accuracy(ensemble_average(a, b));
    return summary;
}

}  // namespace voxmask
