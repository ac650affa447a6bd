#include "voxmask/lpc.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

namespace voxmask {

namespace {

// Raw (unnormalized) autocorrelation r[0..max_lag].
std::vector<double> autocorrelation(const std::vector<double>& frame, int max_lag) {
    std::vector<double> r(max_lag + 1, 0.0);
    const std::size_t n = frame.size();
    for (int lag = 0; lag <= max_lag; ++lag) {
        double acc = 0.0;
        for (std::size_t i = lag; i < n; ++i) acc += frame[i] * frame[i - lag];
        r[lag] = acc;
    }
    return r;
}

}  // namespace

std::vector<std::complex<double>> polynomial_roots(const std::vector<double>& coefficients) {
    const int p = static_cast<int>(coefficients.size());
    if (p == 0) return {};
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(p, p);
    for (int j = 0; j < p; ++j) companion(0, j) = -coefficients[j];
    for (int i = 1; i < p; ++i) companion(i, i - 1) = 1.0;
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, /*computeEigenvectors=*/false);
    std::vector<std::complex<double>> roots(p);
    for (int i = 0; i < p; ++i) roots[i] = solver.eigenvalues()[i];
    return roots;
}

std::vector<double> poly_from_poles(const std::vector<std::complex<double>>& poles) {
    // expand prod (z - pole_k); coeffs[k] multiplies z^(p-1-k) after the
    // leading monic term
    std::vector<std::complex<double>> c(poles.size() + 1, 0.0);
    c[0] = 1.0;
    for (std::size_t k = 0; k < poles.size(); ++k)
        for (std::size_t j = k + 1; j > 0; --j) c[j] -= poles[k] * c[j - 1];
    std::vector<double> out(poles.size());
    for (std::size_t j = 1; j < c.size(); ++j) out[j - 1] = c[j].real();
    return out;
}

std::optional<LpcModel> lpc_analyze(const std::vector<double>& frame, int order) {
    if (order < 1 || order > 64)
        throw std::invalid_argument("lpc_analyze: order must be in [1, 64]");
    if (frame.size() <= static_cast<std::size_t>(order))
        throw std::invalid_argument("lpc_analyze: frame must be longer than the order");

    auto r = autocorrelation(frame, order);
    if (r[0] <= 0.0) return std::nullopt;  // silent frame
    r[0] *= 1.0 + 1e-9;                    // white-noise ridge keeps the recursion stable

    LpcModel model;
    model.order = order;
    model.coefficients.assign(order, 0.0);
    auto& a = model.coefficients;
    double error = r[0];
    std::vector<double> prev(order);
    for (int m = 1; m <= order; ++m) {
        double acc = r[m];
        for (int j = 1; j < m; ++j) acc += a[j - 1] * r[m - j];
        double k = -acc / error;
        if (k >= 1.0) k = 0.9999;
        if (k <= -1.0) k = -0.9999;
        prev.assign(a.begin(), a.begin() + (m - 1));
        for (int j = 1; j < m; ++j) a[j - 1] = prev[j - 1] + k * prev[m - 1 - j];
        a[m - 1] = k;
        error *= 1.0 - k * k;
    }
    model.gain = error;
    model.poles = polynomial_roots(model.coefficients);
    return model;
}

std::vector<double> lpc_residual(const std::vector<double>& frame, const LpcModel& model) {
    std::vector<double> e(frame.size());
    const auto& a = model.coefficients;
    for (std::size_t n = 0; n < frame.size(); ++n) {
        double acc = frame[n];
        for (int k = 1; k <= model.order && static_cast<std::size_t>(k) <= n; ++k)
            acc += a[k - 1] * frame[n - k];
        e[n] = acc;
    }
    return e;
}

std::vector<double> lpc_synthesize(const std::vector<double>& residual, const LpcModel& model) {
    for (const auto& pole : model.poles)
        if (std::abs(pole) >= 1.0 + 1e-9)
            throw std::invalid_argument("lpc_synthesize: unstable model (pole magnitude " +
                                        std::to_string(std::abs(pole)) + ")");
    std::vector<double> y(residual.size());
    const auto& a = model.coefficients;
    for (std::size_t n = 0; n < residual.size(); ++n) {
        double acc = residual[n];
        for (int k = 1; k <= model.order && static_cast<std::size_t>(k) <= n; ++k)
            acc -= a[k - 1] * y[n - k];
        y[n] = acc;
    }
    return y;
}

}  // namespace voxmask
