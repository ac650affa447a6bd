#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "voxmask/anonymize.hpp"
#include "voxmask/manifest.hpp"
#include "voxmask/report.hpp"

namespace voxmask {

// One evaluation pass: an anonymizer plus optional externally computed
// metric inputs (MOS scores, ASR transcripts of the anonymized audio,
// emotion embedding tables, speaker-verification scores). Whatever is
// absent renders as "-" in its report column.
struct PipelineConfig {
    AnonymizerConfig anonymizer;
    std::optional<std::string> mos_csv;
    std::optional<std::string> hyp_transcript_tsv;
    std::optional<std::string> emotion_original_path;
    std::optional<std::string> emotion_anonymized_path;
    std::optional<std::string> external_scores_csv;  // replaces internal EER scoring
};

struct PipelineOptions {
    std::uint64_t seed = 42;
    int workers = 1;
    int max_impostor_per_enroll = 8;
    bool dump_contours = false;  // writes contours/<method>/<id>.csv under out_dir
};

// JSON array of config objects, or a CSV grid with a
// method,step,lpc_order,alpha,... header (chosen by extension).
std::vector<PipelineConfig> load_config_grid(const std::string& path);

// Anonymize -> extract -> score -> one report row per config. Audio lands
// in out_dir/<method>/<id>.wav. Per-utterance failures are excluded from
// the aggregates and counted on the row; only setup errors throw.
EvaluationReport run_pipeline(const std::vector<UtteranceRecord>& manifest,
                              const std::vector<PipelineConfig>& configs,
                              const std::string& out_dir, const PipelineOptions& options = {});

struct EnsembleSummary {
    double accuracy_a = 0.0;
    double accuracy_b = 0.0;
    double accuracy_ensemble = 0.0;
};

// Probability-averaging ensemble of two prediction files; labels may come
// from the files themselves or a third id,label CSV.
EnsembleSummary ensemble_command(const std::string& pred_file_a, const std::string& pred_file_b,
                                 const std::optional<std::string>& labels_csv);

}  // namespace voxmask
