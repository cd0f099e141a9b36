#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "pfc/errors.hpp"
#include "pfc/field.hpp"
#include "pfc/grid.hpp"

namespace pfc {

/// Counter-based PRNG: SplitMix64 evaluated at (seed + golden-ratio stride *
/// counter). Stateless, so node i of a field always receives the same draw
/// regardless of evaluation order or platform.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Uniform draw in [-1, 1) from the counter stream.
inline double uniform_pm1(std::uint64_t seed, std::uint64_t counter) {
    const std::uint64_t bits = splitmix64(seed + counter * 0x9E3779B97F4A7C15ULL);
    const double u01 = static_cast<double>(bits >> 11) * 0x1.0p-53; // [0,1)
    return 2.0 * u01 - 1.0;
}

/// Smooth product-of-cosines initial data for the convergence protocol,
/// defined on the (0,32)^2 box.
inline Field ic_converge(const Grid& grid) {
    if (grid.ndim != 2) throw config_error("ic_converge requires a 2D grid");
    if (grid.lengths[0] != 32.0 || grid.lengths[1] != 32.0)
        throw config_error("ic_converge is defined on the (0,32)x(0,32) domain");
    Field f(grid);
    constexpr double tp = 2.0 * std::numbers::pi;
    for (std::int64_t i = 0; i < grid.node_count; ++i) {
        int x, y, z;
        grid.node_coords(i, x, y, z);
        const double px = grid.coord(0, x), py = grid.coord(1, y);
        f[i] = 0.05 - 0.01 * std::cos(tp * px / 32.0) * std::cos(tp * py / 32.0);
    }
    return f;
}

/// Four-term cosine/sine initial data for the energy-evolution study,
/// defined on the (0,128)^2 box.
inline Field ic_energy_study(const Grid& grid) {
    if (grid.ndim != 2) throw config_error("ic_energy_study requires a 2D grid");
    if (grid.lengths[0] != 128.0 || grid.lengths[1] != 128.0)
        throw config_error("ic_energy_study is defined on the (0,128)x(0,128) domain");
    Field f(grid);
    constexpr double pi = std::numbers::pi;
    for (std::int64_t i = 0; i < grid.node_count; ++i) {
        int x, y, z;
        grid.node_coords(i, x, y, z);
        const double px = grid.coord(0, x), py = grid.coord(1, y);
        const double t2 = 0.02 * std::cos(pi * (px - 12.0) / 16.0) * std::sin(pi * (py - 1.0) / 16.0);
        const double c3 = std::cos(pi * (px + 10.0) / 32.0) * std::cos(pi * (py + 3.0) / 32.0);
        const double s4 = std::sin(pi * px / 8.0) * std::sin(pi * (py - 6.0) / 8.0);
        f[i] = 0.07 - t2 + 0.02 * c3 * c3 - 0.01 * s4 * s4;
    }
    return f;
}

/// base + amp * uniform(-1,1) noise, deterministic in (seed, node index).
inline Field ic_random(const Grid& grid, double base, double amp, std::uint64_t seed) {
    if (!(amp >= 0.0)) throw config_error("ic_random amplitude must be >= 0");
    Field f(grid);
    for (std::int64_t i = 0; i < grid.node_count; ++i)
        f[i] = base + amp * uniform_pm1(seed, static_cast<std::uint64_t>(i));
    return f;
}

struct CrystalPatch {
    double cx = 0.0, cy = 0.0; // patch center
    double size = 30.0;        // square side length
    double theta = 0.0;        // lattice orientation
};

/// Constant melt phi_bar with perfect crystallites stamped into square
/// patches. Local lattice coordinates come from the rotation
/// x_l = x sin(theta) + y cos(theta), y_l = -x cos(theta) + y sin(theta).
inline Field ic_crystal_growth(const Grid& grid, double phibar, double capc, double p,
                               const std::vector<CrystalPatch>& patches) {
    if (grid.ndim != 2) throw config_error("ic_crystal_growth requires a 2D grid");
    for (std::size_t i = 0; i < patches.size(); ++i)
        for (std::size_t j = i + 1; j < patches.size(); ++j) {
            const double half = 0.5 * (patches[i].size + patches[j].size);
            if (std::abs(patches[i].cx - patches[j].cx) < half &&
                std::abs(patches[i].cy - patches[j].cy) < half)
                throw config_error("ic_crystal_growth: patches " + std::to_string(i) + " and " +
                                   std::to_string(j) + " overlap");
        }

    Field f(grid);
    const double s3 = std::sqrt(3.0);
    for (std::int64_t i = 0; i < grid.node_count; ++i) {
        int x, y, z;
        grid.node_coords(i, x, y, z);
        const double px = grid.coord(0, x), py = grid.coord(1, y);
        double v = phibar;
        for (const auto& patch : patches) {
            if (std::abs(px - patch.cx) > 0.5 * patch.size || std::abs(py - patch.cy) > 0.5 * patch.size)
                continue;
            const double xl = px * std::sin(patch.theta) + py * std::cos(patch.theta);
            const double yl = -px * std::cos(patch.theta) + py * std::sin(patch.theta);
            v = phibar + capc * (std::cos(p / s3 * yl) * std::cos(p * xl) -
                                 0.5 * std::cos(2.0 * p / s3 * yl));
            break;
        }
        f[i] = v;
    }
    return f;
}

/// Regular-hexagon membership via the three symmetry-axis projections.
inline bool inside_hexagon(double dx, double dy, double circumradius) {
    const double apothem = circumradius * std::sqrt(3.0) / 2.0;
    for (int i = 0; i < 3; ++i) {
        const double ang = std::numbers::pi / 6.0 + i * std::numbers::pi / 3.0;
        if (std::abs(dx * std::cos(ang) + dy * std::sin(ang)) > apothem) return false;
    }
    return true;
}

/// Random melt inside a central hexagon, constant psi0 outside.
inline Field ic_pattern(const Grid& grid, double psi0, std::uint64_t seed, double circumradius = 16.0) {
    if (grid.ndim != 2) throw config_error("ic_pattern requires a 2D grid");
    Field f(grid);
    const double cx = 0.5 * grid.lengths[0], cy = 0.5 * grid.lengths[1];
    for (std::int64_t i = 0; i < grid.node_count; ++i) {
        int x, y, z;
        grid.node_coords(i, x, y, z);
        const double px = grid.coord(0, x), py = grid.coord(1, y);
        if (inside_hexagon(px - cx, py - cy, circumradius))
            f[i] = 0.1 + 0.5 * uniform_pm1(seed, static_cast<std::uint64_t>(i));
        else
            f[i] = psi0;
    }
    return f;
}

} // namespace pfc
