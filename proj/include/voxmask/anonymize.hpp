#pragma once

#include <optional>
#include <string>
#include <vector>

#include "voxmask/audio.hpp"

namespace voxmask {

enum class AnonymizeMethod { kPitch, kMcadams, kExternal };
enum class GenderPolicy { kRaiseMaleLowerFemale, kFixedDirection };
enum class Gender { kMale, kFemale, kUnspecified };

// Throws std::invalid_argument on an unknown token; accepted (case
// insensitive): male/m, female/f, unspecified/u/"".
Gender parse_gender(const std::string& token);
std::string gender_name(Gender g);

struct AnonymizerConfig {
    AnonymizeMethod method = AnonymizeMethod::kPitch;
    std::string name;                // report row label, defaulted by validate()
    double semitone_step = 4.0;      // pitch magnitude, >= 0
    int lpc_order = 20;              // mcadams, in [1, 64]
    double mcadams_alpha = 0.8;      // in (0, 1]
    std::string backend_command;     // external, with {input}/{output}
    GenderPolicy gender_policy = GenderPolicy::kRaiseMaleLowerFemale;
    double backend_timeout_seconds = 300.0;

    // Checks ranges and fills `name` ("pitch_step4", "mcadams_lpc20", ...).
    // Throws std::invalid_argument on violation.
    void validate();
};

struct AnonymizeStats {
    bool silent_input = false;  // pitch shift skipped on a silent clip
    int clamped_poles = 0;      // mcadams magnitude clamps
};

// Signed shift for one utterance: +step for male / -step for female under
// the gendered policy, +step always under fixed direction. Throws on
// unspecified gender under the gendered policy.
double apply_gender_policy(Gender gender, double step, GenderPolicy policy);

// Shifts pitch (and formants) by the given number of semitones:
// windowed-sinc resample by 2^(-s/12) followed by a WSOLA time stretch
// back to the original duration. A silent clip is returned unchanged and
// flagged in stats.
AudioClip pitch_shift(const AudioClip& clip, double signed_semitones,
                      AnonymizeStats* stats = nullptr);

// Time-domain McAdams warping: per overlapping frame, order-p LPC poles
// with angle theta in (0, pi) are moved to theta^alpha (magnitudes and
// real poles untouched), and the frame residual is re-synthesized through
// the warped filter. Output length equals input length exactly.
AudioClip mcadams_anonymize(const AudioClip& clip, int lpc_order, double alpha,
                            AnonymizeStats* stats = nullptr);

// Runs `backend_command` with {input}/{output} substituted, reads the file
// it produced and resamples to the canonical rate. Throws on nonzero exit
// (message carries stderr), timeout, or missing output.
AudioClip run_external_backend(const std::string& clip_path, const AnonymizerConfig& config);

struct BatchItem {
    std::string id;
    std::string output_path;
    bool ok = false;
    std::string error;  // set when !ok
    AnonymizeStats stats;
};

struct BatchRecord {
    std::string id;
    std::string wav_path;
    Gender gender = Gender::kUnspecified;
};

// Anonymizes every record into out_dir/<id>.wav. Per-record failures are
// captured in the returned items; the batch never aborts early.
std::vector<BatchItem> anonymize_batch(const std::vector<BatchRecord>& records,
                                       const AnonymizerConfig& config,
                                       const std::string& out_dir, int workers = 1);

}  // namespace voxmask
