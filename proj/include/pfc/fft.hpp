#pragma once

#include <complex>
#include <mutex>

#include <fftw3.h>

#include "pfc/errors.hpp"
#include "pfc/field.hpp"

namespace pfc {

namespace detail {
// The FFTW planner is not thread-safe; executing distinct plans is.
inline std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
} // namespace detail

/// Real-to-complex transform pair for one grid.
///
/// Convention: forward is unnormalized (mode 0 = N * mean), inverse divides
/// by the node count, so inverse(forward(f)) == f up to roundoff. Plans are
/// created with FFTW_ESTIMATE, which keeps runs bitwise reproducible.
class FftWorkspace {
  public:
    explicit FftWorkspace(const Grid& grid) : grid_(grid) {
        real_ = fftw_alloc_real(static_cast<std::size_t>(grid.node_count));
        cplx_ = fftw_alloc_complex(static_cast<std::size_t>(grid.spectral_count));
        if (!real_ || !cplx_) throw numeric_error("fft workspace allocation failed");

        // FFTW wants row-major sizes slowest-first; our storage is x fastest.
        int n[3];
        for (int axis = 0; axis < grid.ndim; ++axis) n[axis] = grid.dims[grid.ndim - 1 - axis];

        std::lock_guard<std::mutex> lock(detail::planner_mutex());
        fwd_ = fftw_plan_dft_r2c(grid.ndim, n, real_, cplx_, FFTW_ESTIMATE);
        inv_ = fftw_plan_dft_c2r(grid.ndim, n, cplx_, real_, FFTW_ESTIMATE);
        if (!fwd_ || !inv_) throw numeric_error("fftw plan creation failed");
    }

    FftWorkspace(const FftWorkspace&) = delete;
    FftWorkspace& operator=(const FftWorkspace&) = delete;

    ~FftWorkspace() {
        std::lock_guard<std::mutex> lock(detail::planner_mutex());
        if (fwd_) fftw_destroy_plan(fwd_);
        if (inv_) fftw_destroy_plan(inv_);
        fftw_free(real_);
        fftw_free(cplx_);
    }

    const Grid& grid() const { return grid_; }

    SpectralField forward(const Field& f) {
        require_layout(f.grid);
        if (!all_finite(f)) throw numeric_error("forward transform of non-finite field");
        for (std::int64_t i = 0; i < grid_.node_count; ++i) real_[i] = f.data[static_cast<std::size_t>(i)];
        fftw_execute(fwd_);
        SpectralField out(f.grid);
        for (std::int64_t s = 0; s < grid_.spectral_count; ++s)
            out.coeffs[static_cast<std::size_t>(s)] = {cplx_[s][0], cplx_[s][1]};
        return out;
    }

    Field inverse(const SpectralField& sf) {
        require_layout(sf.grid);
        const double scale = 1.0 / static_cast<double>(grid_.node_count);
        for (std::int64_t s = 0; s < grid_.spectral_count; ++s) {
            cplx_[s][0] = sf.coeffs[static_cast<std::size_t>(s)].real();
            cplx_[s][1] = sf.coeffs[static_cast<std::size_t>(s)].imag();
        }
        fftw_execute(inv_);
        Field out(sf.grid);
        for (std::int64_t i = 0; i < grid_.node_count; ++i)
            out.data[static_cast<std::size_t>(i)] = real_[i] * scale;
        return out;
    }

  private:
    void require_layout(const Grid& g) const {
        if (!grid_.same_layout(g)) throw structural_error("field grid does not match fft workspace grid");
    }

    Grid grid_;
    double* real_ = nullptr;
    fftw_complex* cplx_ = nullptr;
    fftw_plan fwd_ = nullptr;
    fftw_plan inv_ = nullptr;
};

} // namespace pfc
