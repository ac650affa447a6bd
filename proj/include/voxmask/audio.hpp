#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace voxmask {

// All DSP in this library runs on mono clips at kCanonicalRate. Files at
// other rates are resampled on load by load_clip_canonical().
inline constexpr int kCanonicalRate = 16000;

struct AudioClip {
    std::vector<double> samples;  // amplitudes in [-1, 1]
    int sample_rate = kCanonicalRate;
    std::string id;

    double duration_seconds() const {
        return static_cast<double>(samples.size()) / sample_rate;
    }
};

// Throws std::invalid_argument if the clip is empty, has a non-positive
// rate, or contains non-finite samples.
void validate_clip(const AudioClip& clip);

enum class WindowType { kRectangular, kHann, kHamming };

struct FrameSpec {
    int frame_length = 400;  // 25 ms at 16 kHz
    int hop_length = 160;    // 10 ms
    WindowType window = WindowType::kHann;
};

// Reads a RIFF PCM WAV file (8/16/24-bit int or 32-bit float, any channel
// count). Channels are averaged to mono; sample values are normalized by
// the full-scale negative value (int16 -32768 maps to -1.0 exactly).
// Throws std::runtime_error with the path and reason on malformed input.
AudioClip read_wav(const std::string& path, const std::string& id = "");

// Writes a 16-bit PCM mono WAV file. Samples outside [-1, 1] are clipped;
// the return value is the number of clipped samples.
int write_wav(const AudioClip& clip, const std::string& path);

// Band-limited rate conversion (windowed-sinc interpolation, cutoff at the
// lower Nyquist). Returns the input unchanged when rates already match.
AudioClip resample(const AudioClip& clip, int target_rate);

// read_wav + resample to kCanonicalRate.
AudioClip load_clip_canonical(const std::string& path, const std::string& id = "");

// Splits the clip into windowed frames. Frame count is
// floor((len - frame_length) / hop_length) + 1; requires at least one
// full frame of input.
std::vector<std::vector<double>> frame_signal(const AudioClip& clip, const FrameSpec& spec);

std::vector<double> make_window(WindowType type, int length);

}  // namespace voxmask
