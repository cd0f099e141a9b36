#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "pfc/errors.hpp"

namespace pfc {

/// Periodic rectangular grid, 1-3 dimensions.
///
/// Real fields are stored row-major with x fastest. Spectral data uses the
/// real-transform half-spectrum layout: the x axis is halved to nx/2+1 modes,
/// the remaining axes keep the standard FFT ordering [0..n/2, -(n/2-1)..-1].
struct Grid {
    int ndim = 0;
    std::array<int, 3> dims{1, 1, 1};
    std::array<double, 3> lengths{1.0, 1.0, 1.0};
    std::array<std::vector<double>, 3> wavenumbers; // full FFT ordering per axis

    std::int64_t node_count = 0;
    double volume = 0.0;
    double cell_volume = 0.0;

    // half-spectrum layout
    int half_nx = 0;
    std::int64_t spectral_count = 0;
    std::vector<double> k_squared;        // |k|^2 per spectral index
    std::vector<double> mode_multiplicity; // 2 for paired modes, 1 for self-conjugate planes

    int nx() const { return dims[0]; }
    int ny() const { return dims[1]; }
    int nz() const { return dims[2]; }

    bool same_layout(const Grid& other) const {
        return ndim == other.ndim && dims == other.dims && lengths == other.lengths;
    }

    /// Physical coordinate of node index m along an axis: m * L / n.
    double coord(int axis, int index) const {
        return lengths[axis] * static_cast<double>(index) / static_cast<double>(dims[axis]);
    }

    /// Decompose a real-space linear index (x fastest).
    void node_coords(std::int64_t idx, int& x, int& y, int& z) const {
        x = static_cast<int>(idx % dims[0]);
        y = static_cast<int>((idx / dims[0]) % dims[1]);
        z = static_cast<int>(idx / (static_cast<std::int64_t>(dims[0]) * dims[1]));
    }

    /// Decompose a spectral linear index (kx fastest, kx in [0, nx/2]).
    void spectral_coords(std::int64_t idx, int& kx, int& ky, int& kz) const {
        kx = static_cast<int>(idx % half_nx);
        ky = static_cast<int>((idx / half_nx) % dims[1]);
        kz = static_cast<int>(idx / (static_cast<std::int64_t>(half_nx) * dims[1]));
    }
};

/// Signed mode number in standard FFT ordering: [0..n/2, -(n/2-1)..-1].
inline int fft_mode(int index, int n) {
    return (index <= n / 2) ? index : index - n;
}

inline Grid make_grid(const std::vector<int>& dims, const std::vector<double>& lengths) {
    if (dims.empty() || dims.size() > 3)
        throw config_error("grid must have 1 to 3 dimensions, got " + std::to_string(dims.size()));
    if (lengths.size() != dims.size())
        throw config_error("grid dims and lengths must have matching rank");

    Grid g;
    g.ndim = static_cast<int>(dims.size());
    g.node_count = 1;
    g.volume = 1.0;
    for (int axis = 0; axis < g.ndim; ++axis) {
        const int n = dims[axis];
        const double len = lengths[axis];
        if (n < 4 || n % 2 != 0)
            throw config_error("grid dimension " + std::to_string(axis) + " must be even and >= 4, got " +
                               std::to_string(n));
        if (!(len > 0.0) || !std::isfinite(len))
            throw config_error("grid length " + std::to_string(axis) + " must be positive and finite");
        g.dims[axis] = n;
        g.lengths[axis] = len;
        g.node_count *= n;
        g.volume *= len;

        auto& k = g.wavenumbers[axis];
        k.resize(n);
        for (int m = 0; m < n; ++m)
            k[m] = 2.0 * std::numbers::pi * static_cast<double>(fft_mode(m, n)) / len;
    }
    g.cell_volume = g.volume / static_cast<double>(g.node_count);

    g.half_nx = g.dims[0] / 2 + 1;
    g.spectral_count = static_cast<std::int64_t>(g.half_nx) * g.dims[1] * g.dims[2];

    g.k_squared.resize(g.spectral_count);
    g.mode_multiplicity.resize(g.spectral_count);
    for (std::int64_t s = 0; s < g.spectral_count; ++s) {
        int kx, ky, kz;
        g.spectral_coords(s, kx, ky, kz);
        double k2 = g.wavenumbers[0][kx] * g.wavenumbers[0][kx];
        if (g.ndim > 1) k2 += g.wavenumbers[1][ky] * g.wavenumbers[1][ky];
        if (g.ndim > 2) k2 += g.wavenumbers[2][kz] * g.wavenumbers[2][kz];
        g.k_squared[s] = k2;
        g.mode_multiplicity[s] = (kx == 0 || kx == g.dims[0] / 2) ? 1.0 : 2.0;
    }
    return g;
}

} // namespace pfc
