#pragma once

#include <complex>
#include <vector>

namespace voxmask {

// In-place radix-2 FFT; size must be a power of two.
void fft(std::vector<std::complex<double>>& data, bool inverse = false);

std::size_t next_pow2(std::size_t n);

// Magnitude spectrum of a real signal zero-padded to fft_size (first
// fft_size/2 + 1 bins).
std::vector<double> magnitude_spectrum(const std::vector<double>& signal, std::size_t fft_size);

// y[n] = x[n] - coeff * x[n-1]
std::vector<double> pre_emphasis(const std::vector<double>& x, double coeff);

// Inverse of pre_emphasis: y[n] = x[n] + coeff * y[n-1]
std::vector<double> de_emphasis(const std::vector<double>& x, double coeff);

// Frame-averaged MFCC vector, coefficients c_1..c_n (c_0 dropped so the
// result is invariant to overall amplitude).
std::vector<double> mean_mfcc(const std::vector<double>& samples, int sample_rate,
                              int num_coefficients);

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace voxmask
