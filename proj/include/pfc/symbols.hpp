#pragma once

#include <cmath>
#include <vector>

#include "pfc/errors.hpp"
#include "pfc/field.hpp"
#include "pfc/grid.hpp"

namespace pfc {

/// Fourier symbol of P_a = (Laplacian + I)^2 + a I: p_a(k) = (1 - |k|^2)^2 + a.
inline std::vector<double> symbol_pa(const Grid& grid, double a) {
    std::vector<double> sym(static_cast<std::size_t>(grid.spectral_count));
    for (std::int64_t s = 0; s < grid.spectral_count; ++s) {
        const double w = 1.0 - grid.k_squared[static_cast<std::size_t>(s)];
        sym[static_cast<std::size_t>(s)] = w * w + a;
    }
    return sym;
}

/// Fourier symbol of the implicit operator Laplacian((1+alpha) P_a + beta I):
/// l(k) = -|k|^2 ((1+alpha) p_a(k) + beta). Mode 0 is exactly 0.
inline std::vector<double> symbol_l(const Grid& grid, double alpha, double beta, double a) {
    std::vector<double> sym(static_cast<std::size_t>(grid.spectral_count));
    for (std::int64_t s = 0; s < grid.spectral_count; ++s) {
        const double k2 = grid.k_squared[static_cast<std::size_t>(s)];
        const double w = 1.0 - k2;
        sym[static_cast<std::size_t>(s)] = -k2 * ((1.0 + alpha) * (w * w + a) + beta);
    }
    return sym;
}

/// Solve (I - tau a_ii L) u = rhs exactly in Fourier space: divide each mode by
/// (1 - tau a_ii l(k)). The denominator stays >= 1 whenever a_ii >= 0 and l <= 0.
inline SpectralField stage_solve(const SpectralField& rhs, double tau, double aii,
                                 const std::vector<double>& lsym) {
    if (static_cast<std::int64_t>(lsym.size()) != rhs.grid.spectral_count)
        throw structural_error("stage_solve: symbol array does not match grid");
    SpectralField out(rhs.grid);
    for (std::size_t s = 0; s < rhs.coeffs.size(); ++s) {
        const double denom = 1.0 - tau * aii * lsym[s];
        if (denom == 0.0 || !std::isfinite(denom))
            throw numeric_error("stage_solve: vanishing implicit denominator");
        out.coeffs[s] = rhs.coeffs[s] / denom;
    }
    return out;
}

/// 2/3-rule mask: 1 for retained modes, 0 where any axis mode exceeds n/3.
inline std::vector<double> dealias_mask(const Grid& grid) {
    std::vector<double> mask(static_cast<std::size_t>(grid.spectral_count), 1.0);
    for (std::int64_t s = 0; s < grid.spectral_count; ++s) {
        int kx, ky, kz;
        grid.spectral_coords(s, kx, ky, kz);
        const int mx = std::abs(fft_mode(kx, grid.dims[0]));
        const int my = grid.ndim > 1 ? std::abs(fft_mode(ky, grid.dims[1])) : 0;
        const int mz = grid.ndim > 2 ? std::abs(fft_mode(kz, grid.dims[2])) : 0;
        if (3 * mx > grid.dims[0] || (grid.ndim > 1 && 3 * my > grid.dims[1]) ||
            (grid.ndim > 2 && 3 * mz > grid.dims[2]))
            mask[static_cast<std::size_t>(s)] = 0.0;
    }
    return mask;
}

} // namespace pfc
