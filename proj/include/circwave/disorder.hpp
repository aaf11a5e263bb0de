// Quenched Gaussian disorder in the coupling parameter: Gauss-Hermite and
// Monte-Carlo averaging of GGM curves, the quenched accumulated GGM, and the
// breached-GGM fluctuation measure.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <variant>

#include "circwave/entanglement.hpp"
#include "circwave/waveguide.hpp"

namespace circwave {

struct GaussHermite {
    int order = 64;
};

struct MonteCarlo {
    long long samples = 100000;
    std::uint64_t seed = 0;
};

using DisorderScheme = std::variant<GaussHermite, MonteCarlo>;

/// Gaussian coupling distribution: mean J_m, standard deviation sigma, and
/// the integration scheme used for the quenched average.
struct DisorderSpec {
    double mean = 0.0;
    double sigma = 0.0;
    DisorderScheme scheme = GaussHermite{};

    void validate() const {
        if (!std::isfinite(mean)) throw std::invalid_argument("DisorderSpec: mean must be finite");
        if (!(sigma >= 0.0) || !std::isfinite(sigma))
            throw std::invalid_argument("DisorderSpec: sigma must be finite and >= 0");
        if (const auto* gh = std::get_if<GaussHermite>(&scheme)) {
            if (gh->order < 16)
                throw std::invalid_argument("DisorderSpec: Gauss-Hermite order must be >= 16");
        } else if (const auto* mc = std::get_if<MonteCarlo>(&scheme)) {
            if (mc->samples < 1000)
                throw std::invalid_argument("DisorderSpec: Monte-Carlo needs >= 1000 samples");
        }
    }
};

struct QuadratureRule {
    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;
};

/// Gauss-Hermite rule for weight exp(-x^2) by Golub-Welsch: nodes are the
/// eigenvalues of the Jacobi tridiagonal (zero diagonal, off-diagonal
/// sqrt(k/2)), weights sqrt(pi) * (first eigenvector component)^2.
inline QuadratureRule gauss_hermite_rule(int order) {
    if (order < 1) throw std::invalid_argument("gauss_hermite_rule: order must be >= 1");
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(order);
    Eigen::VectorXd sub(order > 1 ? order - 1 : 0);
    for (int k = 1; k < order; ++k) sub(k - 1) = std::sqrt(0.5 * k);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    QuadratureRule rule;
    rule.nodes = es.eigenvalues();
    rule.weights = std::sqrt(std::numbers::pi) *
                   es.eigenvectors().row(0).transpose().array().square();
    return rule;
}

// --- counter-based RNG: bit-reproducible and order-independent -------------

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Derive an independent stream key from (seed, index); used to make
/// parallel sweep rows deterministic regardless of scheduling.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(seed ^ splitmix64(index + 0x517cc1b727220a95ULL));
}

/// Standard normal draw for counter k of the given stream (Box-Muller over
/// two splitmix64 uniforms; no hidden state).
inline double normal_draw(std::uint64_t stream, std::uint64_t counter) {
    const std::uint64_t a = splitmix64(stream + 2 * counter);
    const std::uint64_t b = splitmix64(stream + 2 * counter + 1);
    const double u1 = (static_cast<double>(a >> 11) + 1.0) * 0x1p-53;  // (0, 1]
    const double u2 = static_cast<double>(b >> 11) * 0x1p-53;          // [0, 1)
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

struct McStats {
    double mean = 0.0;
    double standard_error = 0.0;
};

/// Monte-Carlo estimate of E[f(J)], J ~ N(mean, sigma^2), with the sample
/// standard error. Bit-reproducible for a fixed (seed, samples).
inline McStats monte_carlo_average(const std::function<double(double)>& curve, double mean,
                                   double sigma, long long samples, std::uint64_t seed) {
    if (samples < 1) throw std::invalid_argument("monte_carlo_average: samples must be >= 1");
    const std::uint64_t stream = splitmix64(seed);
    double sum = 0.0, sumsq = 0.0;
    for (long long k = 0; k < samples; ++k) {
        const double v = curve(mean + sigma * normal_draw(stream, static_cast<std::uint64_t>(k)));
        sum += v;
        sumsq += v * v;
    }
    McStats out;
    out.mean = sum / static_cast<double>(samples);
    if (samples > 1) {
        const double var = (sumsq - sum * sum / static_cast<double>(samples)) /
                           static_cast<double>(samples - 1);
        out.standard_error = std::sqrt(std::max(var, 0.0) / static_cast<double>(samples));
    }
    return out;
}

/// Quenched average of an arbitrary curve over the Gaussian coupling
/// distribution. sigma = 0 is the delta limit, curve(mean) exactly. The
/// Gauss-Hermite path integrates over the full real line (no truncation).
inline double quenched_average(const std::function<double(double)>& curve,
                               const DisorderSpec& spec) {
    spec.validate();
    if (spec.sigma == 0.0) return curve(spec.mean);
    if (const auto* gh = std::get_if<GaussHermite>(&spec.scheme)) {
        const QuadratureRule rule = gauss_hermite_rule(gh->order);
        const double scale = std::numbers::sqrt2 * spec.sigma;
        double sum = 0.0;
        for (int i = 0; i < rule.nodes.size(); ++i)
            sum += rule.weights(i) * curve(spec.mean + scale * rule.nodes(i));
        return sum / std::sqrt(std::numbers::pi);
    }
    const auto& mc = std::get<MonteCarlo>(spec.scheme);
    return monte_carlo_average(curve, spec.mean, spec.sigma, mc.samples, mc.seed).mean;
}

/// GGM curve of a profile as a function of the coupling alone. G(-J) = G(J)
/// exactly (conjugating the propagator flips the sign of every p quadrature,
/// which leaves reduced symplectic spectra unchanged), so negative quadrature
/// nodes evaluate at |J|.
inline std::function<double(double)> ggm_curve(const CouplingProfile& profile, double squeezing) {
    if (profile.is_all_equal() && profile.modes() >= 4) {
        const int n = profile.modes();
        return [n, squeezing](double j) { return ggm_analytic_lr(n, j, squeezing); };
    }
    return [profile, squeezing](double j) {
        return waveguide_ggm(profile.with_coupling(std::abs(j)), SqueezedInputSpec(squeezing));
    };
}

/// Quenched average GGM for the all-equal (LR) N-mode ring, N >= 4.
inline double quenched_ggm(int modes, double squeezing, const DisorderSpec& spec) {
    if (modes < 4)
        throw std::invalid_argument("quenched_ggm: the all-equal setting requires N >= 4");
    return quenched_average(ggm_curve(CouplingProfile::all_equal(modes, 0.0), squeezing), spec);
}

/// Quenched average GGM for an arbitrary profile (the profile's own J is
/// ignored; the disorder spec supplies the coupling distribution).
inline double quenched_ggm(const CouplingProfile& profile, double squeezing,
                           const DisorderSpec& spec) {
    return quenched_average(ggm_curve(profile, squeezing), spec);
}

namespace detail {
inline double simpson_mean(const std::function<double(double)>& f, double upper, int steps) {
    if (!(upper > 0.0)) throw std::invalid_argument("quenched integral: upper limit must be > 0");
    if (steps < 2 || steps % 2 != 0)
        throw std::invalid_argument("quenched integral: Simpson steps must be even and >= 2");
    const double h = upper / steps;
    double sum = f(0.0) + f(upper);
    for (int k = 1; k < steps; ++k) sum += (k % 2 == 1 ? 4.0 : 2.0) * f(k * h);
    return sum * h / 3.0;
}
}  // namespace detail

/// Quenched accumulated GGM over the mean coupling:
///   (N / 4pi) integral_0^{J_m0} <G>_G dJ_m
/// -- note the period normalization N/(4pi), not 1/J_m0. At J_m0 = 4pi/N and
/// sigma = 0 this reduces to the ordered period average.
inline double quenched_accumulated_ggm(int modes, double squeezing, double sigma, double j_m0,
                                       const DisorderScheme& scheme = GaussHermite{},
                                       int mean_steps = 128) {
    const auto q = [&](double jm) {
        return quenched_ggm(modes, squeezing, DisorderSpec{jm, sigma, scheme});
    };
    return modes / (4.0 * std::numbers::pi) * detail::simpson_mean(q, j_m0, mean_steps);
}

/// Same period-normalized accumulation for an arbitrary ordered curve.
inline double quenched_accumulated(const std::function<double(double)>& curve, int modes,
                                   double sigma, double j_m0,
                                   const DisorderScheme& scheme = GaussHermite{},
                                   int mean_steps = 128) {
    const auto q = [&](double jm) {
        return quenched_average(curve, DisorderSpec{jm, sigma, scheme});
    };
    return modes / (4.0 * std::numbers::pi) * detail::simpson_mean(q, j_m0, mean_steps);
}

/// Breached GGM: the variance of the quenched average over one full cycle of
/// the mean coupling, Delta^2 G = <q^2>_{4pi/N} - <q>_{4pi/N}^2. Small values
/// mean a steady entanglement supply.
inline double breached_ggm(int modes, double squeezing, double sigma,
                           const DisorderScheme& scheme = GaussHermite{}, int mean_steps = 128) {
    const double period = 4.0 * std::numbers::pi / modes;
    const double norm = modes / (4.0 * std::numbers::pi);
    const auto q = [&](double jm) {
        return quenched_ggm(modes, squeezing, DisorderSpec{jm, sigma, scheme});
    };
    const double m1 = norm * detail::simpson_mean(q, period, mean_steps);
    const double m2 = norm * detail::simpson_mean([&](double jm) {
        const double v = q(jm);
        return v * v;
    }, period, mean_steps);
    return m2 - m1 * m1;
}

}  // namespace circwave
