#pragma once

#include <optional>
#include <string>
#include <vector>

#include "voxmask/audio.hpp"

namespace voxmask {

// Per-frame pitch track. `semitones` holds 12*log2(f0/440) and is only
// meaningful where `voiced` is true.
struct F0Contour {
    std::vector<double> frame_times;
    std::vector<double> semitones;
    std::vector<bool> voiced;

    std::size_t size() const { return frame_times.size(); }
    int voiced_count() const;
};

struct ContourDeviation {
    double l1 = 0.0;                // mean |a - b| in semitones, joint voiced frames
    std::optional<double> pcc;      // Pearson correlation; empty when undefined
    int joint_voiced_count = 0;
};

double hz_to_semitones(double hz);
double semitones_to_hz(double st);

// YIN pitch tracker (cumulative mean normalized difference with parabolic
// interpolation), search range 60-500 Hz, 25 ms difference window on a
// 10 ms hop. Frames whose aperiodicity exceeds the threshold are unvoiced;
// silence yields an all-unvoiced contour.
F0Contour extract_f0(const AudioClip& clip, double aperiodicity_threshold = 0.15);

struct AlignedContours {
    std::vector<double> a;
    std::vector<double> b;
};

// Pairs frames by index after truncating to the shorter contour, keeping
// only frames voiced on both sides.
AlignedContours align_contours(const F0Contour& a, const F0Contour& b);

// L1 and PCC between two contours over jointly voiced frames. PCC is left
// empty when fewer than two joint frames exist or either side is constant.
ContourDeviation contour_deviation(const F0Contour& a, const F0Contour& b);

// CSV dump: frame_time,semitone,voiced (one row per frame).
void write_contour_csv(const F0Contour& contour, const std::string& path);

}  // namespace voxmask
