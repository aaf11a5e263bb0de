// Circular waveguide arrays: circulant coupling matrices, the mode-space
// propagator, its symplectic realification, and squeezed-input evolution.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "circwave/symplectic.hpp"

namespace circwave {

/// Ring of N >= 3 waveguides with relative coupling strengths n_i for the
/// interaction ranges i = 1..floor(N/2) (n_1 = 1 fixed, each n_i in [0, 2],
/// active ranges contiguous) and a dimensionless coupling J >= 0 that folds
/// the physical coupling and propagation time into one parameter.
/// (The propagation-distance map t = z*mu/c is bookkeeping only and never
/// enters the code.)
class CouplingProfile {
public:
    CouplingProfile(int modes, std::vector<double> strengths, double coupling)
        : modes_(modes), strengths_(std::move(strengths)), coupling_(coupling) {
        if (modes_ < 3) throw std::invalid_argument("CouplingProfile: need at least 3 modes");
        const auto ranges = static_cast<std::size_t>(modes_ / 2);
        if (strengths_.empty() || strengths_.size() > ranges)
            throw std::invalid_argument("CouplingProfile: strengths list must cover ranges 1.." +
                                        std::to_string(ranges));
        strengths_.resize(ranges, 0.0);
        if (strengths_[0] != 1.0)
            throw std::invalid_argument("CouplingProfile: n_1 is fixed to 1 (rescale J instead)");
        bool zero_seen = false;
        for (std::size_t i = 0; i < ranges; ++i) {
            const double ni = strengths_[i];
            if (!(ni >= 0.0 && ni <= 2.0))
                throw std::invalid_argument("CouplingProfile: n[" + std::to_string(i + 1) +
                                            "] = " + std::to_string(ni) +
                                            " out of range (0 < n_i <= 2)");
            if (ni == 0.0) zero_seen = true;
            else if (zero_seen)
                throw std::invalid_argument(
                    "CouplingProfile: active ranges must be contiguous (n[" +
                    std::to_string(i + 1) + "] != 0 after a zero)");
        }
        if (!(coupling_ >= 0.0) || !std::isfinite(coupling_))
            throw std::invalid_argument("CouplingProfile: coupling J must be finite and >= 0");
    }

    /// n = (1, 0, ..., 0): nearest-neighbor ring.
    static CouplingProfile nearest_neighbor(int modes, double coupling) {
        return up_to_range(modes, 1, coupling);
    }

    /// n = (1, 1, ..., 1): every mode coupled to every other with strength J.
    static CouplingProfile all_equal(int modes, double coupling) {
        return up_to_range(modes, modes / 2, coupling);
    }

    /// Unit strength for ranges 1..range, zero beyond (range=2 is NN+NNN, ...).
    static CouplingProfile up_to_range(int modes, int range, double coupling) {
        if (range < 1 || range > modes / 2)
            throw std::invalid_argument("CouplingProfile: range must be in 1..floor(N/2)");
        std::vector<double> n(static_cast<std::size_t>(modes / 2), 0.0);
        for (int i = 0; i < range; ++i) n[static_cast<std::size_t>(i)] = 1.0;
        return CouplingProfile(modes, std::move(n), coupling);
    }

    CouplingProfile with_coupling(double coupling) const {
        return CouplingProfile(modes_, strengths_, coupling);
    }

    int modes() const { return modes_; }
    const std::vector<double>& strengths() const { return strengths_; }
    double coupling() const { return coupling_; }

    bool is_all_equal() const {
        for (double ni : strengths_)
            if (ni != 1.0) return false;
        return true;
    }

private:
    int modes_;
    std::vector<double> strengths_;
    double coupling_;
};

/// Symmetric circulant coupling matrix in units of J: first row c with
/// c_0 = 0 and c_i = c_{N-i} = J n_i. For even N the range-N/2 strength
/// enters each row once.
struct CouplingMatrix {
    int modes = 0;
    Eigen::MatrixXd matrix;
};

inline CouplingMatrix coupling_matrix(const CouplingProfile& profile) {
    const int n = profile.modes();
    std::vector<double> c(static_cast<std::size_t>(n), 0.0);
    for (int i = 1; i <= n / 2; ++i) {
        const double v = profile.coupling() * profile.strengths()[static_cast<std::size_t>(i - 1)];
        c[static_cast<std::size_t>(i)] = v;
        c[static_cast<std::size_t>(n - i)] = v;
    }
    Eigen::MatrixXd a(n, n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) a(j, k) = c[static_cast<std::size_t>(((k - j) % n + n) % n)];
    return {n, std::move(a)};
}

/// U = exp(-iA) via eigendecomposition of the real symmetric A; unitary to
/// rounding by construction, and the spectrum doubles as the circulant oracle.
inline Eigen::MatrixXcd mode_unitary(const CouplingMatrix& a) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a.matrix);
    const Eigen::VectorXcd phases =
        (std::complex<double>(0.0, -1.0) * es.eigenvalues().cast<std::complex<double>>()).array().exp();
    return es.eigenvectors().cast<std::complex<double>>() * phases.asDiagonal() *
           es.eigenvectors().transpose().cast<std::complex<double>>();
}

/// Circulant eigenvalues in DFT-index order k = 0..N-1:
///   lambda_k = sum_i c_i * 2 cos(2 pi k i / N), the i = N/2 term counted once.
/// Independent of the dense eigensolver path; rejects non-circulant input.
inline Eigen::VectorXd circulant_spectrum(const CouplingMatrix& a) {
    const int n = a.modes;
    if (n < 1 || a.matrix.rows() != n || a.matrix.cols() != n)
        throw std::invalid_argument("circulant_spectrum: malformed coupling matrix");
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            if (std::abs(a.matrix(j, k) - a.matrix(0, (((k - j) % n) + n) % n)) > 1e-12)
                throw std::invalid_argument("circulant_spectrum: matrix is not circulant");

    Eigen::VectorXd lambda(n);
    const double base = 2.0 * std::numbers::pi / n;
    for (int k = 0; k < n; ++k) {
        double sum = 0.0;
        for (int i = 1; i <= n / 2; ++i) {
            const double weight = (2 * i == n) ? 1.0 : 2.0;
            sum += a.matrix(0, i) * weight * std::cos(base * k * i);
        }
        lambda(k) = sum;
    }
    return lambda;
}

/// Realification of an N x N mode unitary to the interleaved quadrature
/// ordering: x' = Re(U) x - Im(U) p, p' = Im(U) x + Re(U) p. The result is
/// orthogonal and symplectic.
inline SymplecticTransform symplectic_from_mode_unitary(const Eigen::MatrixXcd& u) {
    const auto n = u.rows();
    if (n < 1 || n != u.cols())
        throw std::invalid_argument("symplectic_from_mode_unitary: U must be square");
    const double dev =
        (u * u.adjoint() - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
    if (dev > tol::unitarity)
        throw std::invalid_argument("symplectic_from_mode_unitary: U not unitary (|UU^dag - I| = " +
                                    std::to_string(dev) + ")");
    Eigen::MatrixXd s(2 * n, 2 * n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index k = 0; k < n; ++k) {
            const double re = u(j, k).real();
            const double im = u(j, k).imag();
            s(2 * j, 2 * k) = re;
            s(2 * j, 2 * k + 1) = -im;
            s(2 * j + 1, 2 * k) = im;
            s(2 * j + 1, 2 * k + 1) = re;
        }
    return SymplecticTransform(std::move(s));
}

/// Single-mode squeezed input: strength s >= 0, angle reduced mod 2pi,
/// injected into input_mode (1-based; defaults to mode 1 -- the circular
/// symmetry makes the choice immaterial).
struct SqueezedInputSpec {
    double strength = 0.0;
    double angle = 0.0;
    int input_mode = 1;

    SqueezedInputSpec(double s, double theta = 0.0, int mode = 1)
        : strength(s), angle(theta), input_mode(mode) {
        if (!std::isfinite(strength) || strength < 0.0)
            throw std::invalid_argument("SqueezedInputSpec: squeezing strength must be finite and >= 0");
        if (!std::isfinite(angle)) throw std::invalid_argument("SqueezedInputSpec: angle must be finite");
        constexpr double two_pi = 2.0 * std::numbers::pi;
        angle = std::fmod(angle, two_pi);
        if (angle < 0.0) angle += two_pi;
        if (input_mode < 1) throw std::invalid_argument("SqueezedInputSpec: input mode is 1-based");
    }
};

/// Covariance of |squeezed> (x) |0>^(N-1): the 2x2 block
///   (1/2) [[cosh2s + cos(th) sinh2s,  sin(th) sinh2s],
///          [sin(th) sinh2s,           cosh2s - cos(th) sinh2s]]
/// at the input mode, I/2 elsewhere.
inline GaussianState initial_covariance(const SqueezedInputSpec& input, int modes) {
    if (modes < 1) throw std::invalid_argument("initial_covariance: modes must be >= 1");
    if (input.input_mode > modes)
        throw std::invalid_argument("initial_covariance: input mode " +
                                    std::to_string(input.input_mode) + " out of range");
    Eigen::MatrixXd cov = 0.5 * Eigen::MatrixXd::Identity(2 * modes, 2 * modes);
    const double ch = std::cosh(2.0 * input.strength);
    const double sh = std::sinh(2.0 * input.strength);
    const int k = 2 * (input.input_mode - 1);
    cov(k, k) = 0.5 * (ch + std::cos(input.angle) * sh);
    cov(k + 1, k + 1) = 0.5 * (ch - std::cos(input.angle) * sh);
    cov(k, k + 1) = cov(k + 1, k) = 0.5 * std::sin(input.angle) * sh;
    return GaussianState(cov);
}

/// Symplectic propagator of the waveguide Hamiltonian H = a^dag A a.
/// As a quadratic form in (a, a^dag) this H carries a factor 1/2
/// (a^dag A a = xi^dag diag(A, A^T) xi / 2 + const), so the mode propagator
/// is exp(-i A / 2); all couplings J are calibrated to this convention.
inline SymplecticTransform waveguide_propagator(const CouplingProfile& profile) {
    CouplingMatrix half = coupling_matrix(profile);
    half.matrix *= 0.5;
    return symplectic_from_mode_unitary(mode_unitary(half));
}

/// Full pipeline: initial covariance -> circulant propagator -> evolved state.
/// The output of a pure input is pure (all symplectic eigenvalues 1/2).
inline GaussianState evolve_waveguide(const CouplingProfile& profile,
                                      const SqueezedInputSpec& input) {
    return evolve(initial_covariance(input, profile.modes()), waveguide_propagator(profile));
}

}  // namespace circwave
