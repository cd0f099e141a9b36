#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "pfc/grid.hpp"

namespace pfc {

/// Real scalar field on a periodic grid, row-major with x fastest.
struct Field {
    Grid grid;
    std::vector<double> data;

    Field() = default;
    explicit Field(Grid g) : grid(std::move(g)), data(static_cast<std::size_t>(grid.node_count), 0.0) {}

    double& operator[](std::int64_t i) { return data[static_cast<std::size_t>(i)]; }
    double operator[](std::int64_t i) const { return data[static_cast<std::size_t>(i)]; }
};

/// Fourier coefficients of a real field, half-spectrum layout (kx halved).
struct SpectralField {
    Grid grid;
    std::vector<std::complex<double>> coeffs;

    SpectralField() = default;
    explicit SpectralField(Grid g)
        : grid(std::move(g)), coeffs(static_cast<std::size_t>(grid.spectral_count), {0.0, 0.0}) {}
};

inline double max_norm(const Field& f) {
    double m = 0.0;
    for (double v : f.data) m = std::max(m, std::abs(v));
    return m;
}

inline bool all_finite(const Field& f) {
    return std::all_of(f.data.begin(), f.data.end(), [](double v) { return std::isfinite(v); });
}

inline double field_mean(const Field& f) {
    double sum = 0.0;
    for (double v : f.data) sum += v;
    return sum / static_cast<double>(f.grid.node_count);
}

} // namespace pfc
