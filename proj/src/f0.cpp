#include "voxmask/f0.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace voxmask {

namespace {

constexpr double kF0Min = 60.0;
constexpr double kF0Max = 500.0;

// Parabolic refinement of a local minimum of d at integer lag tau.
double refine_minimum(const std::vector<double>& d, int tau) {
    if (tau <= 0 || tau + 1 >= static_cast<int>(d.size())) return tau;
    const double s0 = d[tau - 1], s1 = d[tau], s2 = d[tau + 1];
    const double denom = 2.0 * (2.0 * s1 - s2 - s0);
    if (denom == 0.0) return tau;
    return tau + (s2 - s0) / denom;
}

}  // namespace

int F0Contour::voiced_count() const {
    return static_cast<int>(std::count(voiced.begin(), voiced.end(), true));
}

double hz_to_semitones(double hz) { return 12.0 * std::log2(hz / 440.0); }
double semitones_to_hz(double st) { return 440.0 * std::pow(2.0, st / 12.0); }

F0Contour extract_f0(const AudioClip& clip, double aperiodicity_threshold) {
    validate_clip(clip);
    const int rate = clip.sample_rate;
    const int window = rate * 25 / 1000;             // difference-function window
    const int hop = rate * 10 / 1000;
    const int tau_min = std::max(2, static_cast<int>(rate / kF0Max));
    const int tau_max = static_cast<int>(std::ceil(rate / kF0Min));
    const std::size_t block = static_cast<std::size_t>(window + tau_max);

    F0Contour contour;
    const auto& x = clip.samples;
    if (x.size() < block) return contour;  // too short to track: empty contour

    std::vector<double> d(tau_max + 1), dprime(tau_max + 1);
    for (std::size_t start = 0; start + block <= x.size(); start += hop) {
        // squared difference of the frame with its lagged copy
        for (int tau = 1; tau <= tau_max; ++tau) {
            double acc = 0.0;
            const double* base = x.data() + start;
            for (int j = 0; j < window; ++j) {
                const double delta = base[j] - base[j + tau];
                acc += delta * delta;
            }
            d[tau] = acc;
        }

        // cumulative mean normalization
        dprime[0] = 1.0;
        double running = 0.0;
        for (int tau = 1; tau <= tau_max; ++tau) {
            running += d[tau];
            dprime[tau] = running > 0.0 ? d[tau] * tau / running : 1.0;
        }

        // first dip under the aperiodicity threshold, walked to its local minimum
        int best = -1;
        for (int tau = tau_min; tau <= tau_max; ++tau) {
            if (dprime[tau] < aperiodicity_threshold) {
                while (tau + 1 <= tau_max && dprime[tau + 1] < dprime[tau]) ++tau;
                best = tau;
                break;
            }
        }

        contour.frame_times.push_back((start + window / 2.0) / rate);
        if (best < 0) {
            contour.semitones.push_back(0.0);
            contour.voiced.push_back(false);
            continue;
        }
        const double refined = refine_minimum(d, best);
        const double f0 = rate / refined;
        if (f0 < kF0Min || f0 > kF0Max) {
            contour.semitones.push_back(0.0);
            contour.voiced.push_back(false);
        } else {
            contour.semitones.push_back(hz_to_semitones(f0));
            contour.voiced.push_back(true);
        }
    }
    return contour;
}

AlignedContours align_contours(const F0Contour& a, const F0Contour& b) {
    AlignedContours out;
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (a.voiced[i] && b.voiced[i]) {
            out.a.push_back(a.semitones[i]);
            out.b.push_back(b.semitones[i]);
        }
    }
    return out;
}

ContourDeviation contour_deviation(const F0Contour& a, const F0Contour& b) {
    const auto aligned = align_contours(a, b);
    ContourDeviation dev;
    dev.joint_voiced_count = static_cast<int>(aligned.a.size());
    if (aligned.a.empty()) return dev;

    double l1 = 0.0;
    for (std::size_t i = 0; i < aligned.a.size(); ++i) l1 += std::abs(aligned.a[i] - aligned.b[i]);
    dev.l1 = l1 / aligned.a.size();

    if (dev.joint_voiced_count < 2) return dev;
    const std::size_t n = aligned.a.size();
    double mean_a = 0.0, mean_b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mean_a += aligned.a[i];
        mean_b += aligned.b[i];
    }
    mean_a /= n;
    mean_b /= n;
    double cov = 0.0, var_a = 0.0, var_b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double da = aligned.a[i] - mean_a;
        const double db = aligned.b[i] - mean_b;
        cov += da * db;
        var_a += da * da;
        var_b += db * db;
    }
    if (var_a <= 0.0 || var_b <= 0.0) return dev;  // constant side: PCC undefined
    dev.pcc = cov / std::sqrt(var_a * var_b);
    return dev;
}

void write_contour_csv(const F0Contour& contour, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << "frame_time,semitone,voiced\n";
    char line[80];
    for (std::size_t i = 0; i < contour.size(); ++i) {
        std::snprintf(line, sizeof(line), "%.4f,%.4f,%d\n", contour.frame_times[i],
                      contour.voiced[i] ? contour.semitones[i] : 0.0,
                      contour.voiced[i] ? 1 : 0);
        out << line;
    }
}

}  // namespace voxmask
