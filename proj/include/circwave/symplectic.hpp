// Gaussian-state algebra in the symplectic (covariance-matrix) picture.
//
// Conventions used throughout:
//   * quadrature ordering is interleaved, R = (x1, p1, x2, p2, ..., xN, pN)
//   * vacuum variance is 1/2 (hbar = 1), i.e. the N-mode vacuum is cov = I/2
//   * the symplectic form is M = diag(Omega, ..., Omega), Omega = [[0,1],[-1,0]]

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace circwave {

/// Raised when a matrix that is supposed to describe a quantum state fails a
/// physicality check (symplectic eigenvalue below the vacuum floor,
/// non-positive determinant).
class unphysical_state : public std::runtime_error {
public:
    explicit unphysical_state(const std::string& what) : std::runtime_error(what) {}
};

namespace tol {
inline constexpr double cov_symmetry = 1e-10;      // max allowed |cov - cov^T| entry
inline constexpr double nu_clamp_band = 1e-6;      // [1/2 - band, 1/2) clamps to 1/2
inline constexpr double symplectic_check = 1e-9;   // |S M S^T - M| for valid transforms
inline constexpr double unitarity = 1e-8;          // |U U^dag - I| for mode unitaries
}  // namespace tol

/// Block-diagonal symplectic form for N modes (entries 0, +-1).
inline Eigen::MatrixXd symplectic_form(int modes) {
    if (modes < 1) throw std::invalid_argument("symplectic_form: mode count must be >= 1");
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2 * modes, 2 * modes);
    for (int j = 0; j < modes; ++j) {
        m(2 * j, 2 * j + 1) = 1.0;
        m(2 * j + 1, 2 * j) = -1.0;
    }
    return m;
}

/// Strictly increasing, nonempty set of 1-based mode indices naming a reduction.
/// Upper-range and proper-subset checks happen where the target state is known.
struct ModeSet {
    std::vector<int> modes;

    ModeSet() = default;
    explicit ModeSet(std::vector<int> m) : modes(std::move(m)) {
        if (modes.empty()) throw std::invalid_argument("ModeSet: empty mode list");
        for (std::size_t i = 0; i < modes.size(); ++i) {
            if (modes[i] < 1)
                throw std::invalid_argument("ModeSet: mode indices are 1-based");
            if (i > 0 && modes[i] <= modes[i - 1])
                throw std::invalid_argument("ModeSet: indices must be strictly increasing");
        }
    }

    int size() const { return static_cast<int>(modes.size()); }
    bool operator==(const ModeSet& o) const { return modes == o.modes; }
    bool operator<(const ModeSet& o) const {
        return std::lexicographical_compare(modes.begin(), modes.end(),
                                            o.modes.begin(), o.modes.end());
    }
};

/// Zero-displacement Gaussian state of N modes. The covariance matrix is
/// validated (symmetric within tolerance, positive definite) and symmetrized
/// on construction; instances are immutable values.
class GaussianState {
public:
    explicit GaussianState(Eigen::MatrixXd cov) {
        const auto rows = cov.rows();
        if (rows < 2 || rows != cov.cols() || rows % 2 != 0)
            throw std::invalid_argument("GaussianState: covariance must be 2Nx2N");
        const double asym = (cov - cov.transpose()).cwiseAbs().maxCoeff();
        if (asym > tol::cov_symmetry)
            throw std::invalid_argument("GaussianState: covariance not symmetric (|A - A^T| = " +
                                        std::to_string(asym) + ")");
        cov_ = 0.5 * (cov + cov.transpose());
        Eigen::LLT<Eigen::MatrixXd> llt(cov_);
        if (llt.info() != Eigen::Success)
            throw std::invalid_argument("GaussianState: covariance not positive definite");
        modes_ = static_cast<int>(rows / 2);
    }

    static GaussianState vacuum(int modes) {
        if (modes < 1) throw std::invalid_argument("GaussianState::vacuum: modes must be >= 1");
        return GaussianState(0.5 * Eigen::MatrixXd::Identity(2 * modes, 2 * modes));
    }

    int modes() const { return modes_; }
    const Eigen::MatrixXd& cov() const { return cov_; }

private:
    int modes_ = 0;
    Eigen::MatrixXd cov_;
};

/// Linear symplectic transform S acting on the interleaved quadrature vector.
/// Construction only checks the shape; structural validity is measured by
/// check_symplectic and enforced where transforms are produced.
class SymplecticTransform {
public:
    explicit SymplecticTransform(Eigen::MatrixXd s) : s_(std::move(s)) {
        const auto rows = s_.rows();
        if (rows < 2 || rows != s_.cols() || rows % 2 != 0)
            throw std::invalid_argument("SymplecticTransform: matrix must be 2Nx2N");
        modes_ = static_cast<int>(rows / 2);
    }

    static SymplecticTransform identity(int modes) {
        return SymplecticTransform(Eigen::MatrixXd::Identity(2 * modes, 2 * modes));
    }

    int modes() const { return modes_; }
    const Eigen::MatrixXd& matrix() const { return s_; }

private:
    int modes_ = 0;
    Eigen::MatrixXd s_;
};

/// max |(S M S^T - M)_jk| -- zero for exact symplectic matrices.
inline double check_symplectic(const SymplecticTransform& t) {
    const Eigen::MatrixXd m = symplectic_form(t.modes());
    return (t.matrix() * m * t.matrix().transpose() - m).cwiseAbs().maxCoeff();
}

/// Symplectic eigenvalues of a (possibly reduced) covariance matrix, one per
/// mode, descending. Computed from the Hermitian matrix i X^{1/2} M X^{1/2},
/// whose spectrum is {+-nu_j}; this is the stable equivalent of taking moduli
/// of the eigenvalues of M X. Values in [1/2 - 1e-6, 1/2) are clamped to 1/2;
/// anything lower violates the uncertainty relation and throws.
inline std::vector<double> symplectic_eigenvalues(const GaussianState& state) {
    const int n = state.modes();
    std::vector<double> nus(static_cast<std::size_t>(n));

    if (n == 1) {
        // det(X) = nu^2 for a single mode
        nus[0] = std::sqrt(state.cov().determinant());
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(state.cov());
        const Eigen::VectorXd w = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
        const Eigen::MatrixXd sqrt_cov =
            es.eigenvectors() * w.asDiagonal() * es.eigenvectors().transpose();
        const Eigen::MatrixXcd herm =
            std::complex<double>(0.0, 1.0) * (sqrt_cov * symplectic_form(n) * sqrt_cov);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> hs(herm, Eigen::EigenvaluesOnly);
        const Eigen::VectorXd ev = hs.eigenvalues();  // ascending, symmetric about 0
        for (int k = 0; k < n; ++k) nus[static_cast<std::size_t>(k)] = ev(2 * n - 1 - k);
    }

    for (double& nu : nus) {
        if (nu < 0.5 - tol::nu_clamp_band)
            throw unphysical_state("symplectic eigenvalue " + std::to_string(nu) +
                                   " below the vacuum floor 1/2");
        if (nu < 0.5) nu = 0.5;
    }
    std::sort(nus.begin(), nus.end(), std::greater<double>());
    return nus;
}

/// Principal submatrix selecting the quadrature pairs of the given modes.
/// The reduction must be proper: neither empty nor the full mode set.
inline GaussianState reduce(const GaussianState& state, const ModeSet& modes) {
    const int n = state.modes();
    if (modes.size() >= n)
        throw std::invalid_argument("reduce: mode set must be a proper subset");
    if (modes.modes.back() > n)
        throw std::invalid_argument("reduce: mode index " + std::to_string(modes.modes.back()) +
                                    " out of range for " + std::to_string(n) + " modes");
    const int k = modes.size();
    Eigen::MatrixXd sub(2 * k, 2 * k);
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b)
            sub.block<2, 2>(2 * a, 2 * b) =
                state.cov().block<2, 2>(2 * (modes.modes[static_cast<std::size_t>(a)] - 1),
                                        2 * (modes.modes[static_cast<std::size_t>(b)] - 1));
    return GaussianState(sub);
}

/// cov' = S cov S^T, re-symmetrized to bound drift over long sweep chains.
inline GaussianState evolve(const GaussianState& state, const SymplecticTransform& t) {
    if (t.modes() != state.modes())
        throw std::invalid_argument("evolve: transform acts on " + std::to_string(t.modes()) +
                                    " modes, state has " + std::to_string(state.modes()));
    Eigen::MatrixXd c = t.matrix() * state.cov() * t.matrix().transpose();
    return GaussianState(0.5 * (c + c.transpose()));
}

/// Purity 1/sqrt(2^{2N} det X); equals 1 exactly when all nu_j = 1/2.
inline double purity(const GaussianState& state) {
    Eigen::LLT<Eigen::MatrixXd> llt(state.cov());
    if (llt.info() != Eigen::Success)
        throw unphysical_state("purity: covariance determinant not positive");
    // log det = 2 sum log diag(L)
    double half_logdet = 0.0;
    const auto& l = llt.matrixLLT();
    for (int i = 0; i < l.rows(); ++i) half_logdet += std::log(l(i, i));
    return std::exp(-(state.modes() * std::log(2.0) + half_logdet));
}

}  // namespace circwave
