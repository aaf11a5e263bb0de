// Entanglement measures for pure Gaussian states: the generalized geometric
// measure (numeric and closed-form), its accumulated (J-averaged) variant,
// the three-mode eigenvalue oracle, and Renyi-2 block entropies.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "circwave/symplectic.hpp"
#include "circwave/waveguide.hpp"

namespace circwave {

enum class BipartitionStrategy {
    full_enumeration,   // every proper subset of size <= floor(N/2)
    symmetry_reduced,   // the N-1 contiguous blocks; exact for all-equal coupling
};

/// The symmetry-reduced list relies on the permutation symmetry of the
/// non-input modes, which holds only when every mode couples to every other
/// with equal strength.
inline BipartitionStrategy strategy_for(const CouplingProfile& profile) {
    return profile.is_all_equal() ? BipartitionStrategy::symmetry_reduced
                                  : BipartitionStrategy::full_enumeration;
}

/// Bipartitions to scan for an N-mode state, lexicographically ordered.
/// symmetry_reduced: blocks {1..m} and {2..m+1} for m = 1..floor(N/2); for
/// even N the size-N/2 block appears once ({1..N/2}), for odd N both.
inline std::vector<ModeSet> enumerate_bipartitions(int modes, BipartitionStrategy strategy) {
    if (modes < 2) throw std::invalid_argument("enumerate_bipartitions: need at least 2 modes");
    std::vector<ModeSet> out;
    const int half = modes / 2;
    if (strategy == BipartitionStrategy::symmetry_reduced) {
        for (int m = 1; m <= half; ++m) {
            std::vector<int> first(static_cast<std::size_t>(m));
            std::vector<int> second(static_cast<std::size_t>(m));
            for (int i = 0; i < m; ++i) {
                first[static_cast<std::size_t>(i)] = 1 + i;
                second[static_cast<std::size_t>(i)] = 2 + i;
            }
            out.emplace_back(std::move(first));
            if (m < half || modes % 2 == 1) out.emplace_back(std::move(second));
        }
    } else {
        for (int m = 1; m <= half; ++m) {
            std::vector<int> pick(static_cast<std::size_t>(m));
            for (int i = 0; i < m; ++i) pick[static_cast<std::size_t>(i)] = 1 + i;
            while (true) {
                out.emplace_back(pick);
                int i = m - 1;
                while (i >= 0 && pick[static_cast<std::size_t>(i)] == modes - (m - 1 - i)) --i;
                if (i < 0) break;
                ++pick[static_cast<std::size_t>(i)];
                for (int j = i + 1; j < m; ++j)
                    pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

struct GgmResult {
    double value = 0.0;                // 1 - max_fidelity_term
    ModeSet argmax_bipartition;        // lexicographically smallest maximizer
    double max_fidelity_term = 1.0;    // prod_i 2/(1 + 2 nu_i) over that reduction
};

/// GGM of a pure state: 1 minus the maximal fidelity term
/// prod_i 2/(1 + 2 nu_i) over the enumerated reductions. Requires N >= 3 and
/// purity 1 within 1e-6 (mixed-state GGM is out of scope). Ties in the
/// maximum resolve to the lexicographically smallest mode set.
inline GgmResult ggm(const GaussianState& state, BipartitionStrategy strategy) {
    if (state.modes() < 3)
        throw std::invalid_argument("ggm: genuine multimode entanglement needs N >= 3");
    if (std::abs(purity(state) - 1.0) > 1e-6)
        throw std::invalid_argument("ggm: state is not pure (purity gate 1e-6)");

    GgmResult result;
    result.max_fidelity_term = -1.0;
    for (const ModeSet& part : enumerate_bipartitions(state.modes(), strategy)) {
        double fidelity = 1.0;
        for (double nu : symplectic_eigenvalues(reduce(state, part)))
            fidelity *= 2.0 / (1.0 + 2.0 * nu);
        if (fidelity > result.max_fidelity_term) {
            result.max_fidelity_term = fidelity;
            result.argmax_bipartition = part;
        }
    }
    result.value = 1.0 - result.max_fidelity_term;
    return result;
}

/// GGM of an evolved waveguide state, with the strategy chosen per profile.
inline double waveguide_ggm(const CouplingProfile& profile, const SqueezedInputSpec& input) {
    return ggm(evolve_waveguide(profile, input), strategy_for(profile)).value;
}

/// Closed-form GGM for all-equal coupling, N >= 4:
///   nu = sqrt(f1/4 - 2 sinh^2(s) [f2 cos(JN/2) + cos(JN)] + f3 cosh(2s)) / N^2
/// with f1 = N^4 - 4N^2 + 12, f2 = N^2 - 4, f3 = N^2 - 3, and
/// GGM = 1 - 2/(2 nu + 1). Periodic in J with period 4 pi / N.
inline double analytic_lr_nu(int modes, double coupling, double squeezing) {
    if (modes < 4)
        throw std::invalid_argument("analytic_lr_nu: closed form requires N >= 4");
    const double n2 = static_cast<double>(modes) * modes;
    const double f1 = n2 * n2 - 4.0 * n2 + 12.0;
    const double f2 = n2 - 4.0;
    const double f3 = n2 - 3.0;
    const double sh2 = std::sinh(squeezing) * std::sinh(squeezing);
    const double inside = 0.25 * f1 -
                          2.0 * sh2 * (f2 * std::cos(coupling * modes / 2.0) +
                                       std::cos(coupling * modes)) +
                          f3 * std::cosh(2.0 * squeezing);
    return std::sqrt(inside) / n2;
}

inline double ggm_analytic_lr(int modes, double coupling, double squeezing) {
    return 1.0 - 2.0 / (2.0 * analytic_lr_nu(modes, coupling, squeezing) + 1.0);
}

/// Symplectic eigenvalues of the single-mode reductions of the evolved
/// three-mode ring (input mode first, then the two symmetric neighbors):
///   nu1 = sqrt(57 + 24 cosh2s - 16 sinh^2 s (cos(3J/2) + 2 cos 3J)) / 18
///   nu2 = sqrt(57 + 24 cosh2s -  8 sinh^2 s (5 cos(3J/2) + cos 3J)) / 18
inline std::pair<double, double> three_mode_nu(double coupling, double squeezing) {
    const double sh2 = std::sinh(squeezing) * std::sinh(squeezing);
    const double ch = std::cosh(2.0 * squeezing);
    const double c1 = std::cos(1.5 * coupling);
    const double c3 = std::cos(3.0 * coupling);
    const double nu1 = std::sqrt(57.0 + 24.0 * ch - 16.0 * sh2 * (c1 + 2.0 * c3)) / 18.0;
    const double nu2 = std::sqrt(57.0 + 24.0 * ch - 8.0 * sh2 * (5.0 * c1 + c3)) / 18.0;
    return {nu1, nu2};
}

/// Three-mode GGM from the closed-form eigenvalues (only single-mode
/// reductions exist for N = 3).
inline double three_mode_ggm(double coupling, double squeezing) {
    const auto [nu1, nu2] = three_mode_nu(coupling, squeezing);
    const double nu = std::max(nu1, nu2);
    return 1.0 - 2.0 / (1.0 + 2.0 * nu);
}

/// Accumulated GGM: (1/J0) integral_0^J0 G(J) dJ by composite Simpson.
/// steps must be even and >= 64; the default 512 is far beyond what the
/// smooth trigonometric-polynomial curves need.
inline double accumulated_ggm(const std::function<double(double)>& curve, double j0,
                              int steps = 512) {
    if (!(j0 > 0.0)) throw std::invalid_argument("accumulated_ggm: J0 must be > 0");
    if (steps < 64 || steps % 2 != 0)
        throw std::invalid_argument("accumulated_ggm: Simpson steps must be even and >= 64");
    const double h = j0 / steps;
    double sum = curve(0.0) + curve(j0);
    for (int k = 1; k < steps; ++k) sum += (k % 2 == 1 ? 4.0 : 2.0) * curve(k * h);
    return sum * h / (3.0 * j0);
}

/// Renyi-2 entropy of a Gaussian state: (1/2) ln(2^{2N} det X).
/// Zero for pure states, positive for mixed reductions.
inline double renyi2_entropy(const GaussianState& state) {
    Eigen::LLT<Eigen::MatrixXd> llt(state.cov());
    if (llt.info() != Eigen::Success)
        throw unphysical_state("renyi2_entropy: covariance determinant not positive");
    double half_logdet = 0.0;
    const auto& l = llt.matrixLLT();
    for (int i = 0; i < l.rows(); ++i) half_logdet += std::log(l(i, i));
    return state.modes() * std::log(2.0) + half_logdet;
}

/// Block entropy of the contiguous block {2, ..., L+1} (the input mode is
/// excluded), for 1 <= L <= floor(N/2) - 1.
inline double block_entropy(const GaussianState& state, int block_length) {
    const int n = state.modes();
    if (n < 3) throw std::invalid_argument("block_entropy: need at least 3 modes");
    if (block_length < 1 || block_length > n / 2 - 1)
        throw std::invalid_argument("block_entropy: block length " +
                                    std::to_string(block_length) + " outside 1..floor(N/2)-1");
    std::vector<int> block(static_cast<std::size_t>(block_length));
    for (int i = 0; i < block_length; ++i) block[static_cast<std::size_t>(i)] = 2 + i;
    return renyi2_entropy(reduce(state, ModeSet(std::move(block))));
}

}  // namespace circwave
