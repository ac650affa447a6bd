#include "doctest.h"

#include <cmath>
#include <random>

#include "test_support.hpp"
#include "voxmask/anonymize.hpp"
#include "voxmask/f0.hpp"

using namespace voxmask;
using namespace testsupport;

namespace {

F0Contour synthetic_contour(std::mt19937& rng, std::size_t frames, double voiced_fraction = 0.8) {
    std::uniform_real_distribution<double> pitch(-20.0, 0.0);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    F0Contour c;
    for (std::size_t i = 0; i < frames; ++i) {
        c.frame_times.push_back(0.01 * i);
        c.semitones.push_back(pitch(rng));
        c.voiced.push_back(coin(rng) < voiced_fraction);
    }
    return c;
}

}  // namespace

TEST_SUITE_BEGIN("f0");

TEST_CASE("semitone conversions anchor at A4") {
    CHECK(hz_to_semitones(440.0) == doctest::Approx(0.0));
    CHECK(hz_to_semitones(220.0) == doctest::Approx(-12.0));
    CHECK(semitones_to_hz(12.0) == doctest::Approx(880.0));
}

TEST_CASE("440 Hz sine tracks at 0 semitones") {
    const auto contour = extract_f0(make_sine(440.0, 1.0));
    REQUIRE(contour.voiced_count() > 50);
    for (std::size_t i = 0; i < contour.size(); ++i)
        if (contour.voiced[i]) CHECK(std::abs(contour.semitones[i]) < 0.05);
}

TEST_CASE("220 Hz sine tracks at -12 semitones") {
    const auto contour = extract_f0(make_sine(220.0, 1.0));
    REQUIRE(contour.voiced_count() > 50);
    for (std::size_t i = 0; i < contour.size(); ++i)
        if (contour.voiced[i]) CHECK(std::abs(contour.semitones[i] + 12.0) < 0.05);
}

TEST_CASE("digital silence has zero voiced frames") {
    AudioClip silence;
    silence.sample_rate = 16000;
    silence.id = "silence";
    silence.samples.assign(16000, 0.0);
    CHECK(extract_f0(silence).voiced_count() == 0);
}

TEST_CASE("harmonic sweep 110-400 Hz: at most 0.1 semitone error on 95% of frames") {
    for (double f0 : {110.0, 150.0, 196.0, 261.6, 329.6, 400.0}) {
        const auto clip = make_harmonic(f0, 1.0);
        const auto contour = extract_f0(clip);
        const double expected = hz_to_semitones(f0);
        REQUIRE(contour.voiced_count() > 40);
        int good = 0, voiced = 0;
        for (std::size_t i = 0; i < contour.size(); ++i) {
            if (!contour.voiced[i]) continue;
            ++voiced;
            const double err = std::abs(contour.semitones[i] - expected);
            CHECK(err < 6.0);  // no octave errors anywhere
            if (err <= 0.1) ++good;
        }
        CHECK(good >= voiced * 95 / 100);
    }
}

TEST_CASE("frame times strictly increase") {
    const auto contour = extract_f0(make_sine(200.0, 0.8));
    for (std::size_t i = 1; i < contour.size(); ++i)
        CHECK(contour.frame_times[i] > contour.frame_times[i - 1]);
}

TEST_CASE("align_contours: identical, offset-voicing and unequal lengths") {
    std::mt19937 rng(5);
    F0Contour a = synthetic_contour(rng, 50, 1.0);
    CHECK(align_contours(a, a).a.size() == 50);

    F0Contour b = a;
    for (std::size_t i = 0; i < 50; ++i) {
        a.voiced[i] = i < 10;         // voiced on 0-9
        b.voiced[i] = i >= 5 && i < 15;  // voiced on 5-14
    }
    CHECK(align_contours(a, b).a.size() == 5);

    F0Contour c = synthetic_contour(rng, 100, 1.0);
    F0Contour d = synthetic_contour(rng, 98, 1.0);
    CHECK(align_contours(c, d).a.size() == 98);
}

TEST_CASE("contour_deviation basics") {
    std::mt19937 rng(9);
    const auto a = synthetic_contour(rng, 60, 1.0);

    SUBCASE("identical contours") {
        const auto dev = contour_deviation(a, a);
        CHECK(dev.l1 == 0.0);
        REQUIRE(dev.pcc.has_value());
        CHECK(*dev.pcc == doctest::Approx(1.0));
    }
    SUBCASE("constant shift: l1 = |c|, pcc = 1") {
        F0Contour b = a;
        for (auto& s : b.semitones) s += 4.0;
        const auto dev = contour_deviation(a, b);
        CHECK(dev.l1 == doctest::Approx(4.0).epsilon(1e-12));
        REQUIRE(dev.pcc.has_value());
        CHECK(*dev.pcc == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("negated deviations: pcc = -1") {
        double mean = 0.0;
        for (double s : a.semitones) mean += s;
        mean /= a.semitones.size();
        F0Contour b = a;
        for (auto& s : b.semitones) s = mean - (s - mean);
        const auto dev = contour_deviation(a, b);
        REQUIRE(dev.pcc.has_value());
        CHECK(*dev.pcc == doctest::Approx(-1.0).epsilon(1e-12));
    }
}

TEST_CASE("pcc scale law: pcc(a, lambda*a + c) = sign(lambda)") {
    std::mt19937 rng(13);
    const auto a = synthetic_contour(rng, 80, 1.0);
    for (double lambda : {2.5, 0.01, -0.7, -3.0}) {
        F0Contour b = a;
        for (auto& s : b.semitones) s = lambda * s + 1.3;
        const auto dev = contour_deviation(a, b);
        REQUIRE(dev.pcc.has_value());
        CHECK(*dev.pcc == doctest::Approx(lambda > 0 ? 1.0 : -1.0).epsilon(1e-9));
    }
}

TEST_CASE("undefined pcc markers") {
    F0Contour a, b;
    // single joint voiced frame
    for (int i = 0; i < 3; ++i) {
        a.frame_times.push_back(0.01 * i);
        b.frame_times.push_back(0.01 * i);
        a.semitones.push_back(-5.0 + i);
        b.semitones.push_back(-4.0 + i);
        a.voiced.push_back(i == 0);
        b.voiced.push_back(i == 0);
    }
    auto dev = contour_deviation(a, b);
    CHECK(dev.joint_voiced_count == 1);
    CHECK(dev.l1 == doctest::Approx(1.0));
    CHECK_FALSE(dev.pcc.has_value());

    // constant side
    for (int i = 0; i < 3; ++i) {
        a.voiced[i] = true;
        b.voiced[i] = true;
        b.semitones[i] = -2.0;
    }
    dev = contour_deviation(a, b);
    CHECK(dev.joint_voiced_count == 3);
    CHECK_FALSE(dev.pcc.has_value());

    // no joint voiced frames at all
    for (int i = 0; i < 3; ++i) b.voiced[i] = false;
    dev = contour_deviation(a, b);
    CHECK(dev.joint_voiced_count == 0);
    CHECK(dev.l1 == 0.0);
    CHECK_FALSE(dev.pcc.has_value());
}

TEST_CASE("end-to-end: pitch shift moves L1 by the step and keeps the contour shape") {
    const auto clip = make_vowel(150.0, {{650.0, 90.0}, {1100.0, 110.0}}, 2.0, 16000, "v", 5.0, 1.0);
    const auto original = extract_f0(clip);
    double prev_l1 = -1.0;
    for (double step : {2.0, 4.0, 6.0}) {
        const auto dev = contour_deviation(original, extract_f0(pitch_shift(clip, step)));
        REQUIRE(dev.joint_voiced_count > 50);
        CHECK(std::abs(dev.l1 - step) <= 0.5);
        CHECK(dev.l1 > prev_l1);
        REQUIRE(dev.pcc.has_value());
        CHECK(*dev.pcc > 0.8);  // shape preserved, only the level moves
        prev_l1 = dev.l1;
    }
}

TEST_CASE("end-to-end: mcadams leaves the F0 contour nearly untouched") {
    const auto clip = make_vowel(150.0, {{650.0, 90.0}, {1100.0, 110.0}}, 2.0, 16000, "v", 5.0, 1.0);
    const auto dev =
        contour_deviation(extract_f0(clip), extract_f0(mcadams_anonymize(clip, 20, 0.8)));
    REQUIRE(dev.joint_voiced_count > 50);
    CHECK(dev.l1 < 0.5);
    REQUIRE(dev.pcc.has_value());
    CHECK(*dev.pcc > 0.9);
}

TEST_CASE("contour csv dump") {
    TempDir tmp;
    const auto contour = extract_f0(make_sine(440.0, 0.3));
    write_contour_csv(contour, tmp.file("c.csv"));
    std::ifstream in(tmp.file("c.csv"));
    std::string header;
    std::getline(in, header);
    CHECK(header == "frame_time,semitone,voiced");
    std::size_t lines = 0;
    for (std::string line; std::getline(in, line);) ++lines;
    CHECK(lines == contour.size());
}

TEST_SUITE_END();
