#include "voxmask/audio.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <string>

namespace voxmask {

namespace {

[[noreturn]] void fail_read(const std::string& path, const std::string& reason) {
    throw std::runtime_error("read_wav: " + path + ": " + reason);
}

uint32_t read_u32(const unsigned char* p) {
    return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
           (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

uint16_t read_u16(const unsigned char* p) {
    return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

struct WavFormat {
    uint16_t code = 0;  // 1 = PCM, 3 = IEEE float
    uint16_t channels = 0;
    uint32_t sample_rate = 0;
    uint16_t bits_per_sample = 0;
};

double decode_sample(const unsigned char* p, const WavFormat& fmt) {
    switch (fmt.bits_per_sample) {
        case 8:
            // unsigned with 128 bias
            return (static_cast<int>(p[0]) - 128) / 128.0;
        case 16: {
            int16_t v = static_cast<int16_t>(p[0] | (p[1] << 8));
            return v / 32768.0;
        }
        case 24: {
            int32_t v = p[0] | (p[1] << 8) | (p[2] << 16);
            if (v & 0x800000) v |= ~0xFFFFFF;  // sign extend
            return v / 8388608.0;
        }
        case 32: {
            uint32_t bits = read_u32(p);
            float f;
            std::memcpy(&f, &bits, sizeof(f));
            return f;
        }
        default:
            return 0.0;
    }
}

}  // namespace

void validate_clip(const AudioClip& clip) {
    if (clip.samples.empty())
        throw std::invalid_argument("audio clip '" + clip.id + "' has no samples");
    if (clip.sample_rate <= 0)
        throw std::invalid_argument("audio clip '" + clip.id + "' has non-positive sample rate");
    for (double s : clip.samples)
        if (!std::isfinite(s))
            throw std::invalid_argument("audio clip '" + clip.id + "' contains non-finite samples");
}

AudioClip read_wav(const std::string& path, const std::string& id) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail_read(path, "cannot open file");

    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
        std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
        fail_read(path, "not a RIFF/WAVE file");

    WavFormat fmt;
    bool have_fmt = false;
    std::size_t data_begin = 0, data_size = 0;

    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const unsigned char* hdr = bytes.data() + pos;
        uint32_t chunk_size = read_u32(hdr + 4);
        std::size_t body = pos + 8;
        if (body + chunk_size > bytes.size()) {
            // tolerate a truncated final data chunk only
            if (std::memcmp(hdr, "data", 4) != 0) fail_read(path, "truncated chunk");
            chunk_size = static_cast<uint32_t>(bytes.size() - body);
        }
        if (std::memcmp(hdr, "fmt ", 4) == 0) {
            if (chunk_size < 16) fail_read(path, "fmt chunk too small");
            fmt.code = read_u16(hdr + 8);
            fmt.channels = read_u16(hdr + 10);
            fmt.sample_rate = read_u32(hdr + 12);
            fmt.bits_per_sample = read_u16(hdr + 22);
            if (fmt.code == 0xFFFE) {
                // WAVE_FORMAT_EXTENSIBLE: first two GUID bytes carry the code
                if (chunk_size < 40) fail_read(path, "extensible fmt chunk too small");
                fmt.code = read_u16(hdr + 8 + 24);
            }
            have_fmt = true;
        } else if (std::memcmp(hdr, "data", 4) == 0) {
            data_begin = body;
            data_size = chunk_size;
        }
        pos = body + chunk_size + (chunk_size & 1);  // chunks are word-aligned
    }

    if (!have_fmt) fail_read(path, "missing fmt chunk");
    if (data_begin == 0) fail_read(path, "missing data chunk");
    if (fmt.channels == 0 || fmt.sample_rate == 0) fail_read(path, "malformed fmt chunk");

    const bool pcm_ok = fmt.code == 1 && (fmt.bits_per_sample == 8 || fmt.bits_per_sample == 16 ||
                                          fmt.bits_per_sample == 24);
    const bool float_ok = fmt.code == 3 && fmt.bits_per_sample == 32;
    if (!pcm_ok && !float_ok)
        fail_read(path, "unsupported codec (format " + std::to_string(fmt.code) + ", " +
                            std::to_string(fmt.bits_per_sample) + " bits)");

    const std::size_t bytes_per_sample = fmt.bits_per_sample / 8;
    const std::size_t frame_bytes = bytes_per_sample * fmt.channels;
    const std::size_t num_frames = data_size / frame_bytes;
    if (num_frames == 0) fail_read(path, "empty data chunk");

    AudioClip clip;
    clip.sample_rate = static_cast<int>(fmt.sample_rate);
    clip.id = id.empty() ? path : id;
    clip.samples.resize(num_frames);
    for (std::size_t i = 0; i < num_frames; ++i) {
        const unsigned char* frame = bytes.data() + data_begin + i * frame_bytes;
        double acc = 0.0;
        for (unsigned c = 0; c < fmt.channels; ++c)
            acc += decode_sample(frame + c * bytes_per_sample, fmt);
        double v = acc / fmt.channels;
        if (!std::isfinite(v)) fail_read(path, "non-finite sample value");
        clip.samples[i] = std::clamp(v, -1.0, 1.0);
    }
    return clip;
}

int write_wav(const AudioClip& clip, const std::string& path) {
    validate_clip(clip);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_wav: cannot open " + path + " for writing");

    const uint32_t num_samples = static_cast<uint32_t>(clip.samples.size());
    const uint32_t data_size = num_samples * 2;
    const uint32_t rate = static_cast<uint32_t>(clip.sample_rate);

    unsigned char header[44];
    auto put_u32 = [&](std::size_t at, uint32_t v) {
        header[at] = v & 0xFF;
        header[at + 1] = (v >> 8) & 0xFF;
        header[at + 2] = (v >> 16) & 0xFF;
        header[at + 3] = (v >> 24) & 0xFF;
    };
    auto put_u16 = [&](std::size_t at, uint16_t v) {
        header[at] = v & 0xFF;
        header[at + 1] = (v >> 8) & 0xFF;
    };
    std::memcpy(header, "RIFF", 4);
    put_u32(4, 36 + data_size);
    std::memcpy(header + 8, "WAVEfmt ", 8);
    put_u32(16, 16);
    put_u16(20, 1);  // PCM
    put_u16(22, 1);  // mono
    put_u32(24, rate);
    put_u32(28, rate * 2);
    put_u16(32, 2);
    put_u16(34, 16);
    std::memcpy(header + 36, "data", 4);
    put_u32(40, data_size);
    out.write(reinterpret_cast<const char*>(header), sizeof(header));

    int clipped = 0;
    std::vector<unsigned char> payload(data_size);
    for (std::size_t i = 0; i < num_samples; ++i) {
        double s = clip.samples[i];
        if (s < -1.0 || s > 1.0) {
            ++clipped;
            s = std::clamp(s, -1.0, 1.0);
        }
        long v = std::lround(s * 32768.0);
        v = std::clamp(v, -32768L, 32767L);
        payload[2 * i] = static_cast<unsigned char>(v & 0xFF);
        payload[2 * i + 1] = static_cast<unsigned char>((v >> 8) & 0xFF);
    }
    out.write(reinterpret_cast<const char*>(payload.data()), payload.size());
    if (!out) throw std::runtime_error("write_wav: short write to " + path);
    return clipped;
}

AudioClip resample(const AudioClip& clip, int target_rate) {
    if (target_rate <= 0) throw std::invalid_argument("resample: target rate must be positive");
    validate_clip(clip);
    if (target_rate == clip.sample_rate) return clip;

    const double ratio = static_cast<double>(target_rate) / clip.sample_rate;
    const std::size_t in_len = clip.samples.size();
    const std::size_t out_len =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(in_len * ratio)));

    // Windowed-sinc kernel, 16 zero crossings per side, Blackman window,
    // cutoff just under the lower of the two Nyquist rates.
    const double cutoff = 0.5 * std::min(1.0, ratio) * 0.97;
    const double half_width = 16.0 / (2.0 * cutoff);
    const int radius = static_cast<int>(std::ceil(half_width));

    const auto& x = clip.samples;
    AudioClip out;
    out.sample_rate = target_rate;
    out.id = clip.id;
    out.samples.resize(out_len);

    for (std::size_t m = 0; m < out_len; ++m) {
        const double t = m / ratio;
        const int center = static_cast<int>(std::floor(t));
        double acc = 0.0, wsum = 0.0;
        for (int n = center - radius; n <= center + radius + 1; ++n) {
            const double d = n - t;
            if (std::abs(d) > half_width) continue;
            const double sx = 2.0 * cutoff * d;
            const double sinc = sx == 0.0 ? 1.0
                                          : std::sin(std::numbers::pi * sx) /
                                                (std::numbers::pi * sx);
            const double wx = d / half_width;
            const double window = 0.42 + 0.5 * std::cos(std::numbers::pi * wx) +
                                  0.08 * std::cos(2.0 * std::numbers::pi * wx);
            const double h = 2.0 * cutoff * sinc * window;
            wsum += h;
            if (n >= 0 && n < static_cast<int>(in_len)) acc += x[n] * h;
        }
        out.samples[m] = wsum > 0.0 ? acc / wsum : 0.0;
    }
    return out;
}

AudioClip load_clip_canonical(const std::string& path, const std::string& id) {
    return resample(read_wav(path, id), kCanonicalRate);
}

std::vector<double> make_window(WindowType type, int length) {
    std::vector<double> w(length, 1.0);
    if (type == WindowType::kRectangular || length <= 1) return w;
    for (int n = 0; n < length; ++n) {
        const double phase = 2.0 * std::numbers::pi * n / length;
        w[n] = type == WindowType::kHann ? 0.5 - 0.5 * std::cos(phase)
                                         : 0.54 - 0.46 * std::cos(phase);
    }
    return w;
}

std::vector<std::vector<double>> frame_signal(const AudioClip& clip, const FrameSpec& spec) {
    validate_clip(clip);
    if (spec.hop_length <= 0 || spec.hop_length > spec.frame_length)
        throw std::invalid_argument("frame spec requires 0 < hop_length <= frame_length");
    const std::size_t len = clip.samples.size();
    if (len < static_cast<std::size_t>(spec.frame_length))
        throw std::invalid_argument("clip '" + clip.id + "' is shorter than one frame");

    const std::size_t count = (len - spec.frame_length) / spec.hop_length + 1;
    const auto window = make_window(spec.window, spec.frame_length);
    std::vector<std::vector<double>> frames(count);
    for (std::size_t f = 0; f < count; ++f) {
        frames[f].resize(spec.frame_length);
        const std::size_t start = f * spec.hop_length;
        for (int n = 0; n < spec.frame_length; ++n)
            frames[f][n] = clip.samples[start + n] * window[n];
    }
    return frames;
}

}  // namespace voxmask
