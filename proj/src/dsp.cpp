#include "voxmask/dsp.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "voxmask/audio.hpp"

namespace voxmask {

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

void fft(std::vector<std::complex<double>>& data, bool inverse) {
    const std::size_t n = data.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw std::invalid_argument("fft size must be a power of two");

    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(data[i], data[j]);
    }

    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double angle = (inverse ? 2.0 : -2.0) * std::numbers::pi / len;
        const std::complex<double> wstep(std::cos(angle), std::sin(angle));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const auto u = data[i + k];
                const auto v = data[i + k + len / 2] * w;
                data[i + k] = u + v;
                data[i + k + len / 2] = u - v;
                w *= wstep;
            }
        }
    }
    if (inverse)
        for (auto& v : data) v /= static_cast<double>(n);
}

std::vector<double> magnitude_spectrum(const std::vector<double>& signal, std::size_t fft_size) {
    fft_size = next_pow2(fft_size);
    std::vector<std::complex<double>> buf(fft_size);
    const std::size_t n = std::min(signal.size(), fft_size);
    for (std::size_t i = 0; i < n; ++i) buf[i] = signal[i];
    fft(buf);
    std::vector<double> mag(fft_size / 2 + 1);
    for (std::size_t i = 0; i < mag.size(); ++i) mag[i] = std::abs(buf[i]);
    return mag;
}

std::vector<double> pre_emphasis(const std::vector<double>& x, double coeff) {
    std::vector<double> y(x.size());
    double prev = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        y[i] = x[i] - coeff * prev;
        prev = x[i];
    }
    return y;
}

std::vector<double> de_emphasis(const std::vector<double>& x, double coeff) {
    std::vector<double> y(x.size());
    double prev = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        y[i] = x[i] + coeff * prev;
        prev = y[i];
    }
    return y;
}

namespace {

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

}  // namespace

std::vector<double> mean_mfcc(const std::vector<double>& samples, int sample_rate,
                              int num_coefficients) {
    constexpr int kNumFilters = 26;
    const int frame_len = sample_rate * 25 / 1000;
    const int hop = sample_rate * 10 / 1000;
    if (samples.size() < static_cast<std::size_t>(frame_len))
        throw std::invalid_argument("mean_mfcc: input shorter than one frame");

    const std::size_t fft_size = next_pow2(frame_len);
    const std::size_t num_bins = fft_size / 2 + 1;
    const auto window = make_window(WindowType::kHann, frame_len);
    const auto emphasized = pre_emphasis(samples, 0.97);

    // triangular mel filterbank over [0, Nyquist]
    const double mel_lo = hz_to_mel(0.0);
    const double mel_hi = hz_to_mel(sample_rate / 2.0);
    std::vector<double> centers(kNumFilters + 2);
    for (int m = 0; m < kNumFilters + 2; ++m)
        centers[m] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * m / (kNumFilters + 1)) * fft_size /
                     sample_rate;

    std::vector<double> mean_log_mel(kNumFilters, 0.0);
    std::size_t frames = 0;
    std::vector<std::complex<double>> buf(fft_size);
    for (std::size_t start = 0; start + frame_len <= emphasized.size(); start += hop) {
        std::fill(buf.begin(), buf.end(), std::complex<double>(0.0));
        for (int n = 0; n < frame_len; ++n) buf[n] = emphasized[start + n] * window[n];
        fft(buf);
        for (int m = 0; m < kNumFilters; ++m) {
            const double lo = centers[m], mid = centers[m + 1], hi = centers[m + 2];
            double energy = 0.0;
            for (std::size_t k = static_cast<std::size_t>(std::ceil(lo));
                 k < num_bins && k <= static_cast<std::size_t>(hi); ++k) {
                const double w = k <= mid ? (k - lo) / std::max(mid - lo, 1e-12)
                                          : (hi - k) / std::max(hi - mid, 1e-12);
                if (w <= 0.0) continue;
                energy += w * std::norm(buf[k]);
            }
            mean_log_mel[m] += std::log(std::max(energy, 1e-12));
        }
        ++frames;
    }
    for (auto& v : mean_log_mel) v /= static_cast<double>(frames);

    // DCT-II; c0 carries overall level and is dropped
    std::vector<double> mfcc(num_coefficients);
    for (int k = 1; k <= num_coefficients; ++k) {
        double acc = 0.0;
        for (int m = 0; m < kNumFilters; ++m)
            acc += mean_log_mel[m] * std::cos(std::numbers::pi * k * (m + 0.5) / kNumFilters);
        mfcc[k - 1] = acc;
    }
    return mfcc;
}

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("cosine_similarity: dimension mismatch");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0)
        throw std::invalid_argument("cosine_similarity: zero vector");
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace voxmask
