#pragma once

#include <cmath>
#include <limits>

#include "pfc/errors.hpp"
#include "pfc/fft.hpp"
#include "pfc/field.hpp"
#include "pfc/grid.hpp"

namespace pfc {

/// Lipschitz constant of the truncated nonlinearity: max of |3 phi^2 - 2 r phi
/// - (eps + a)| over [-m0, m0]. The parabola attains its extrema at the
/// endpoints and at phi = r/3 if that lies inside the interval.
inline double lipschitz_constant(double epsilon, double a, double r, double m0) {
    if (!std::isfinite(m0)) return std::numeric_limits<double>::infinity();
    const double ea = epsilon + a;
    auto fprime = [&](double phi) { return 3.0 * phi * phi - 2.0 * r * phi - ea; };
    double lip = std::max(std::abs(fprime(m0)), std::abs(fprime(-m0)));
    if (std::abs(r / 3.0) <= m0) lip = std::max(lip, std::abs(fprime(r / 3.0)));
    return lip;
}

/// Model parameters. m0 = +infinity disables truncation (f_trunc == f_plain).
struct ModelParams {
    double epsilon = 0.025; // undercooling
    double a = 0.001;       // linear stabilizer folded into P_a
    double alpha = 0.0;     // splitting stabilizer on P_a
    double beta = 1.0;      // splitting stabilizer on I
    double r = 0.0;         // cubic-term coefficient (0 recovers the plain model)
    double m0 = std::numeric_limits<double>::infinity(); // truncation bound
    double lip = std::numeric_limits<double>::infinity(); // derived from the above

    static ModelParams make(double epsilon, double a, double alpha, double beta, double r, double m0) {
        if (!(epsilon > 0.0 && epsilon < 1.0)) throw config_error("epsilon must lie in (0,1)");
        if (!(a >= 0.0) || !std::isfinite(a)) throw config_error("stabilizer a must be >= 0");
        if (!std::isfinite(alpha) || !std::isfinite(beta)) throw config_error("alpha, beta must be finite");
        if (!(r >= 0.0) || !std::isfinite(r)) throw config_error("cubic coefficient r must be >= 0");
        if (!(m0 > 0.0)) throw config_error("truncation bound m0 must be positive");
        ModelParams p;
        p.epsilon = epsilon;
        p.a = a;
        p.alpha = alpha;
        p.beta = beta;
        p.r = r;
        p.m0 = m0;
        p.lip = lipschitz_constant(epsilon, a, r, m0);
        return p;
    }

    bool truncation_enabled() const { return std::isfinite(m0); }
};

/// f(phi) = phi^3 - r phi^2 - (eps + a) phi. The gradient of F below.
inline double f_plain(double phi, const ModelParams& p) {
    return phi * phi * phi - p.r * phi * phi - (p.epsilon + p.a) * phi;
}

/// f'(phi) = 3 phi^2 - 2 r phi - (eps + a).
inline double f_prime(double phi, const ModelParams& p) {
    return 3.0 * phi * phi - 2.0 * p.r * phi - (p.epsilon + p.a);
}

/// Truncated nonlinearity: equals f_plain on [-m0, m0] (same arithmetic path),
/// C^1 linear extension outside, so it is globally Lipschitz with constant lip.
inline double f_trunc(double phi, const ModelParams& p) {
    if (phi > p.m0) return f_plain(p.m0, p) + f_prime(p.m0, p) * (phi - p.m0);
    if (phi < -p.m0) return f_plain(-p.m0, p) + f_prime(-p.m0, p) * (phi + p.m0);
    return f_plain(phi, p);
}

/// F(phi) = 1/4 phi^4 - r/3 phi^3 - (eps+a)/2 phi^2.
inline double big_f(double phi, const ModelParams& p) {
    const double phi2 = phi * phi;
    return 0.25 * phi2 * phi2 - (p.r / 3.0) * phi2 * phi - 0.5 * (p.epsilon + p.a) * phi2;
}

/// Truncated potential: quadratic growth beyond +-m0 with matching value and
/// slope, so that d/dphi big_f_trunc = f_trunc everywhere.
inline double big_f_trunc(double phi, const ModelParams& p) {
    if (phi > p.m0) {
        const double d = phi - p.m0;
        return big_f(p.m0, p) + f_plain(p.m0, p) * d + 0.5 * f_prime(p.m0, p) * d * d;
    }
    if (phi < -p.m0) {
        const double d = phi + p.m0;
        return big_f(-p.m0, p) + f_plain(-p.m0, p) * d + 0.5 * f_prime(-p.m0, p) * d * d;
    }
    return big_f(phi, p);
}

/// Total mass: cell-volume-weighted nodal sum of phi.
inline double mass(const Field& f) {
    double sum = 0.0;
    for (double v : f.data) sum += v;
    return sum * f.grid.cell_volume;
}

/// Free energy with a precomputed (unnormalized-forward) transform of phi:
///   E = int 1/2 phi (Lap+I)^2 phi + a/2 phi^2 + F(phi) dx,
/// the operator term evaluated spectrally, the rest by collocation quadrature.
inline double energy_with_spectral(const Field& phi, const SpectralField& phat, const ModelParams& p,
                                   bool use_trunc) {
    const Grid& g = phi.grid;
    double quad = 0.0;
    for (std::int64_t s = 0; s < g.spectral_count; ++s) {
        const double w = 1.0 - g.k_squared[static_cast<std::size_t>(s)];
        quad += g.mode_multiplicity[static_cast<std::size_t>(s)] * w * w *
                std::norm(phat.coeffs[static_cast<std::size_t>(s)]);
    }
    const double n = static_cast<double>(g.node_count);
    double e = 0.5 * quad * g.volume / (n * n);

    double nodal = 0.0;
    for (double v : phi.data) {
        const double fv = use_trunc ? big_f_trunc(v, p) : big_f(v, p);
        nodal += 0.5 * p.a * v * v + fv;
    }
    return e + nodal * g.cell_volume;
}

inline double energy(const Field& phi, const ModelParams& p, bool use_trunc, FftWorkspace& fft) {
    return energy_with_spectral(phi, fft.forward(phi), p, use_trunc);
}

/// A-priori bound constants from the initial energy and mean: the chain
/// M1 (Laplacian norm), M2 (L2 norm), M3 (gradient norm), and the max-norm
/// bound M = c_omega sqrt(M1^2 + M2^2 + M3^2).
struct BoundChain {
    double m1 = 0.0, m2 = 0.0, m3 = 0.0, m = 0.0;
    double c_p = 0.0, c_omega = 0.0;
    double eps_free = 0.0;
};

inline BoundChain bound_chain(double energy0, double mean0, double omega_volume, double c_omega,
                              double c_p) {
    if (!(c_omega > 0.0) || !(c_p > 0.0)) throw config_error("bound_chain: constants must be positive");
    if (!(omega_volume > 0.0)) throw config_error("bound_chain: domain volume must be positive");
    const double radicand = energy0 + omega_volume;
    if (radicand < 0.0) throw config_error("bound_chain: energy0 + |Omega| must be nonnegative");

    BoundChain b;
    b.c_p = c_p;
    b.c_omega = c_omega;
    b.eps_free = std::min(1.0, 1.0 / c_p); // keeps (eps/2) * c_p <= 1/2
    const double ubar = std::abs(mean0) * std::sqrt(omega_volume);
    b.m1 = 2.0 * std::sqrt(radicand);
    b.m2 = (c_p / b.eps_free) * b.m1 + 2.0 * ubar;
    b.m3 = b.eps_free * ubar + (0.5 * c_p + 1.0 / b.eps_free) * b.m1;
    b.m = c_omega * std::sqrt(b.m1 * b.m1 + b.m2 * b.m2 + b.m3 * b.m3);
    return b;
}

/// Default truncation bound: a generous multiple of the initial max-norm.
/// The stepper monitors every stage against it rather than assuming it.
inline double default_truncation_bound(const Field& phi0, double safety_factor = 10.0) {
    return safety_factor * std::max(1.0, max_norm(phi0));
}

/// Poincare constant of the periodic box: reciprocal square root of the
/// smallest nonzero Laplacian eigenvalue, max_axis(L) / (2 pi).
inline double poincare_constant(const Grid& g) {
    double lmax = 0.0;
    for (int axis = 0; axis < g.ndim; ++axis) lmax = std::max(lmax, g.lengths[axis]);
    return lmax / (2.0 * std::numbers::pi);
}

} // namespace pfc
