#pragma once

#include <complex>
#include <optional>
#include <vector>

namespace voxmask {

// All-pole model of one analysis frame. `coefficients` holds a_1..a_p of
// the inverse (prediction-error) filter A(z) = 1 + a_1 z^-1 + ... + a_p z^-p,
// so the residual is e[n] = x[n] + sum_k a_k x[n-k]. `gain` is the final
// prediction-error energy from the Levinson recursion. `poles` are the
// roots of A(z).
struct LpcModel {
    int order = 0;
    std::vector<double> coefficients;
    double gain = 0.0;
    std::vector<std::complex<double>> poles;
};

// Fits an order-p autocorrelation LPC model to a windowed frame via
// Levinson-Durbin; poles come from the companion matrix of A(z).
// Returns nullopt for a degenerate (all-zero) frame. Order must be in
// [1, 64] and the frame longer than the order.
std::optional<LpcModel> lpc_analyze(const std::vector<double>& frame, int order);

// Inverse filter: e[n] = x[n] + sum_k a_k x[n-k], zero initial state.
std::vector<double> lpc_residual(const std::vector<double>& frame, const LpcModel& model);

// All-pole synthesis: y[n] = e[n] - sum_k a_k y[n-k], zero initial state.
// Rejects models with poles on or outside the unit circle. An order-0
// model passes the residual through unchanged.
std::vector<double> lpc_synthesize(const std::vector<double>& residual, const LpcModel& model);

// Rebuilds monic polynomial coefficients a_1..a_p from a full set of poles
// (imaginary residue of conjugate pairs is discarded).
std::vector<double> poly_from_poles(const std::vector<std::complex<double>>& poles);

// Roots of z^p + a_1 z^(p-1) + ... + a_p via companion-matrix eigenvalues.
std::vector<std::complex<double>> polynomial_roots(const std::vector<double>& coefficients);

}  // namespace voxmask
