#include "doctest.h"

#include <cmath>
#include <random>

#include "test_support.hpp"
#include "voxmask/audio.hpp"

using namespace voxmask;
using namespace testsupport;

TEST_SUITE_BEGIN("audio");

TEST_CASE("read_wav: 16-bit mono identity") {
    TempDir tmp;
    std::vector<int32_t> ch(16000);
    for (std::size_t i = 0; i < ch.size(); ++i)
        ch[i] = static_cast<int32_t>(8000 * std::sin(2.0 * std::numbers::pi * 220.0 * i / 16000));
    write_raw_wav(tmp.file("a.wav"), {ch}, 16000, 16);

    const auto clip = read_wav(tmp.file("a.wav"));
    CHECK(clip.samples.size() == 16000);
    CHECK(clip.sample_rate == 16000);
    for (std::size_t i = 0; i < 100; ++i)
        CHECK(clip.samples[i] == doctest::Approx(ch[i] / 32768.0).epsilon(1e-12));
}

TEST_CASE("read_wav: opposite stereo channels cancel") {
    TempDir tmp;
    std::vector<int32_t> left(1000), right(1000);
    std::mt19937 rng(7);
    for (std::size_t i = 0; i < left.size(); ++i) {
        left[i] = static_cast<int32_t>(rng() % 30000) - 15000;
        right[i] = -left[i];
    }
    write_raw_wav(tmp.file("s.wav"), {left, right}, 16000, 16);
    const auto clip = read_wav(tmp.file("s.wav"));
    for (double s : clip.samples) CHECK(s == 0.0);
}

TEST_CASE("read_wav: int16 full-scale negative maps to -1 exactly") {
    TempDir tmp;
    write_raw_wav(tmp.file("n.wav"), {{-32768, 32767, 0}}, 16000, 16);
    const auto clip = read_wav(tmp.file("n.wav"));
    CHECK(clip.samples[0] == -1.0);
    CHECK(clip.samples[1] == doctest::Approx(32767.0 / 32768.0));
    CHECK(clip.samples[2] == 0.0);
}

TEST_CASE("read_wav: 8-bit and 24-bit payloads") {
    TempDir tmp;
    write_raw_wav(tmp.file("b8.wav"), {{0, 128, 255}}, 8000, 8);
    const auto c8 = read_wav(tmp.file("b8.wav"));
    CHECK(c8.samples[0] == doctest::Approx(-1.0));
    CHECK(c8.samples[1] == doctest::Approx(0.0));
    CHECK(c8.samples[2] == doctest::Approx(127.0 / 128.0));

    write_raw_wav(tmp.file("b24.wav"), {{-8388608, 8388607, 4194304}}, 8000, 24);
    const auto c24 = read_wav(tmp.file("b24.wav"));
    CHECK(c24.samples[0] == doctest::Approx(-1.0));
    CHECK(c24.samples[1] == doctest::Approx(8388607.0 / 8388608.0));
    CHECK(c24.samples[2] == doctest::Approx(0.5));
}

TEST_CASE("read_wav: error paths name the file and reason") {
    TempDir tmp;
    CHECK_THROWS_WITH_AS(read_wav(tmp.file("missing.wav")),
                         doctest::Contains("cannot open"), std::runtime_error);

    std::ofstream(tmp.file("junk.wav")) << "definitely not a wav";
    CHECK_THROWS_WITH_AS(read_wav(tmp.file("junk.wav")), doctest::Contains("RIFF"),
                         std::runtime_error);

    // 32-bit int PCM is not a supported codec
    write_raw_wav(tmp.file("i32.wav"), {{0, 1, 2}}, 16000, 32, /*float_format=*/false);
    CHECK_THROWS_WITH_AS(read_wav(tmp.file("i32.wav")), doctest::Contains("unsupported codec"),
                         std::runtime_error);
}

TEST_CASE("write_wav/read_wav round trip within one quantization step, 1000 random clips") {
    TempDir tmp;
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::uniform_int_distribution<int> len(1, 400);
    const double lsb = std::pow(2.0, -15.0);
    int violations = 0, clip_warnings = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        AudioClip clip;
        clip.sample_rate = 16000;
        clip.id = "rt";
        clip.samples.resize(len(rng));
        for (auto& s : clip.samples) s = dist(rng);
        clip_warnings += write_wav(clip, tmp.file("rt.wav"));
        const auto back = read_wav(tmp.file("rt.wav"));
        REQUIRE(back.samples.size() == clip.samples.size());
        for (std::size_t i = 0; i < clip.samples.size(); ++i)
            if (std::abs(back.samples[i] - clip.samples[i]) > lsb) ++violations;
    }
    CHECK(violations == 0);
    CHECK(clip_warnings == 0);
}

TEST_CASE("write_wav: all-zero clip stays zero, out-of-range samples clip with a count") {
    TempDir tmp;
    AudioClip zeros;
    zeros.sample_rate = 16000;
    zeros.id = "z";
    zeros.samples.assign(100, 0.0);
    CHECK(write_wav(zeros, tmp.file("z.wav")) == 0);
    for (double s : read_wav(tmp.file("z.wav")).samples) CHECK(s == 0.0);

    AudioClip hot = zeros;
    hot.samples[10] = 1.5;
    CHECK(write_wav(hot, tmp.file("h.wav")) == 1);
    const auto back = read_wav(tmp.file("h.wav"));
    CHECK(back.samples[10] == doctest::Approx(32767.0 / 32768.0));
}

TEST_CASE("resample: sine peak survives 16k -> 48k") {
    const auto clip = make_sine(440.0, 1.0, 16000);
    const auto up = resample(clip, 48000);
    CHECK(up.sample_rate == 48000);
    CHECK(std::abs(fft_peak_hz(up.samples, up.sample_rate) - 440.0) < 1.0);
    // duration within one sample period
    CHECK(std::abs(up.duration_seconds() - clip.duration_seconds()) <= 1.0 / 16000);
}

TEST_CASE("resample: identity at equal rates") {
    const auto clip = make_sine(300.0, 0.25);
    const auto same = resample(clip, clip.sample_rate);
    CHECK(same.samples == clip.samples);
}

TEST_CASE("resample: 1 s at 16 kHz down to 8 kHz gives 8000 +- 1 samples") {
    const auto clip = make_sine(440.0, 1.0, 16000);
    const auto down = resample(clip, 8000);
    CHECK(std::abs(static_cast<long>(down.samples.size()) - 8000L) <= 1);
    CHECK(std::abs(fft_peak_hz(down.samples, down.sample_rate) - 440.0) < 1.0);
}

TEST_CASE("resample: linear in the input signal") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> dist(-0.5, 0.5);
    AudioClip x;
    x.sample_rate = 16000;
    x.id = "lin";
    x.samples.resize(2000);
    for (auto& s : x.samples) s = dist(rng);

    AudioClip scaled = x;
    for (auto& s : scaled.samples) s *= 0.37;

    const auto rx = resample(x, 11025);
    const auto rs = resample(scaled, 11025);
    REQUIRE(rx.samples.size() == rs.samples.size());
    for (std::size_t i = 0; i < rx.samples.size(); ++i)
        CHECK(std::abs(rs.samples[i] - 0.37 * rx.samples[i]) < 1e-9);
}

TEST_CASE("frame_signal: counts and windows") {
    AudioClip clip;
    clip.sample_rate = 16000;
    clip.id = "frames";

    FrameSpec spec;
    spec.frame_length = 400;
    spec.hop_length = 160;
    spec.window = WindowType::kRectangular;

    clip.samples.assign(400, 1.0);
    CHECK(frame_signal(clip, spec).size() == 1);

    clip.samples.assign(720, 1.0);
    const auto frames = frame_signal(clip, spec);
    CHECK(frames.size() == 3);
    // rectangular window: frame equals the raw slice
    for (double v : frames[1]) CHECK(v == 1.0);

    clip.samples.assign(399, 1.0);
    CHECK_THROWS_AS(frame_signal(clip, spec), std::invalid_argument);

    spec.window = WindowType::kHann;
    clip.samples.assign(720, 1.0);
    const auto hann = frame_signal(clip, spec);
    CHECK(hann[0][0] == doctest::Approx(0.0));
    CHECK(hann[0][200] == doctest::Approx(1.0));
}

TEST_CASE("validate_clip rejects empty, non-finite, bad rate") {
    AudioClip clip;
    clip.id = "bad";
    CHECK_THROWS_AS(validate_clip(clip), std::invalid_argument);
    clip.samples = {0.1, 0.2};
    clip.sample_rate = 0;
    CHECK_THROWS_AS(validate_clip(clip), std::invalid_argument);
    clip.sample_rate = 16000;
    clip.samples[1] = std::nan("");
    CHECK_THROWS_AS(validate_clip(clip), std::invalid_argument);
}

TEST_SUITE_END();
