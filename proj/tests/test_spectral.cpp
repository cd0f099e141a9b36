#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>
#include <random>

#include "pfc/fft.hpp"
#include "pfc/symbols.hpp"

using namespace pfc;
constexpr double tp = 2.0 * std::numbers::pi;

namespace {

Field random_field(const Grid& g, unsigned seed, double amp = 1.0) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(-amp, amp);
    Field f(g);
    for (auto& v : f.data) v = dist(rng);
    return f;
}

} // namespace

TEST_CASE("make_grid: wavenumbers in FFT order") {
    SUBCASE("2*pi domain gives integer wavenumbers") {
        const Grid g = make_grid({8}, {tp});
        const std::vector<double> expect{0, 1, 2, 3, 4, -3, -2, -1};
        REQUIRE(g.wavenumbers[0].size() == 8);
        for (int m = 0; m < 8; ++m)
            CHECK(g.wavenumbers[0][static_cast<std::size_t>(m)] ==
                  doctest::Approx(expect[static_cast<std::size_t>(m)]).epsilon(1e-15));
        CHECK(g.wavenumbers[0][0] == 0.0);
    }
    SUBCASE("k1 = 2*pi/L") {
        const Grid g = make_grid({8}, {32.0});
        CHECK(g.wavenumbers[0][1] == doctest::Approx(tp / 32.0).epsilon(1e-15));
    }
    SUBCASE("|k|^2 at mode (1,1) on the unit square") {
        const Grid g = make_grid({4, 4}, {1.0, 1.0});
        // spectral index of (kx=1, ky=1): half_nx = 3
        const std::int64_t s = 1 + 3 * 1;
        CHECK(g.k_squared[static_cast<std::size_t>(s)] ==
              doctest::Approx(8.0 * std::numbers::pi * std::numbers::pi).epsilon(1e-14));
    }
}

TEST_CASE("make_grid rejects bad configurations") {
    CHECK_THROWS_AS(make_grid({7}, {1.0}), config_error);      // odd
    CHECK_THROWS_AS(make_grid({2}, {1.0}), config_error);      // tiny
    CHECK_THROWS_AS(make_grid({8}, {0.0}), config_error);      // zero length
    CHECK_THROWS_AS(make_grid({8, 8}, {1.0}), config_error);   // rank mismatch
    CHECK_THROWS_AS(make_grid({}, {}), config_error);          // empty
    CHECK_THROWS_AS(make_grid({8, 8, 8, 8}, {1, 1, 1, 1}), config_error);
}

TEST_CASE("forward/inverse: DC convention and round trip") {
    const Grid g = make_grid({16, 16}, {3.0, 5.0});
    FftWorkspace fft(g);

    SUBCASE("constant field has only mode 0, value c*N") {
        Field f(g);
        const double c = 0.7;
        for (auto& v : f.data) v = c;
        const SpectralField sf = fft.forward(f);
        CHECK(sf.coeffs[0].real() ==
              doctest::Approx(c * static_cast<double>(g.node_count)).epsilon(1e-14));
        CHECK(std::abs(sf.coeffs[0].imag()) < 1e-12);
        for (std::size_t s = 1; s < sf.coeffs.size(); ++s)
            CHECK(std::abs(sf.coeffs[s]) < 1e-12 * static_cast<double>(g.node_count));
    }

    SUBCASE("single cosine excites exactly one half-spectrum mode") {
        Field f(g);
        for (std::int64_t i = 0; i < g.node_count; ++i) {
            int x, y, z;
            g.node_coords(i, x, y, z);
            f[i] = std::cos(tp * g.coord(0, x) / g.lengths[0]);
        }
        const SpectralField sf = fft.forward(f);
        const double n = static_cast<double>(g.node_count);
        for (std::int64_t s = 0; s < g.spectral_count; ++s) {
            int kx, ky, kz;
            g.spectral_coords(s, kx, ky, kz);
            const double mag = std::abs(sf.coeffs[static_cast<std::size_t>(s)]);
            if (kx == 1 && ky == 0)
                CHECK(mag == doctest::Approx(n / 2.0).epsilon(1e-12));
            else
                CHECK(mag < 1e-12 * n);
        }
    }

    SUBCASE("random round trip") {
        const Field f = random_field(g, 123);
        const Field back = fft.inverse(fft.forward(f));
        double err = 0.0;
        for (std::size_t i = 0; i < f.data.size(); ++i)
            err = std::max(err, std::abs(f.data[i] - back.data[i]));
        CHECK(err < 1e-13 * max_norm(f));
    }

    SUBCASE("mode 0 equals N * mean") {
        const Field f = random_field(g, 321);
        const SpectralField sf = fft.forward(f);
        CHECK(sf.coeffs[0].real() ==
              doctest::Approx(field_mean(f) * static_cast<double>(g.node_count)).epsilon(1e-13));
    }

    SUBCASE("non-finite input is rejected") {
        Field f(g);
        f[3] = std::numeric_limits<double>::quiet_NaN();
        CHECK_THROWS_AS(fft.forward(f), numeric_error);
    }
}

TEST_CASE("symbol_pa values") {
    const Grid g = make_grid({8, 8}, {tp, tp}); // integer wavenumbers
    const double a = 0.001;
    const auto pa = symbol_pa(g, a);
    CHECK(pa[0] == doctest::Approx(1.0 + a).epsilon(1e-15)); // |k| = 0
    // |k| = 1: mode (1,0)
    CHECK(pa[1] == doctest::Approx(a).epsilon(1e-12));
    // |k|^2 = 2: mode (1,1); half_nx = 5
    CHECK(pa[static_cast<std::size_t>(1 + 5)] == doctest::Approx(1.0 + a).epsilon(1e-12));
}

TEST_CASE("symbol_l values and sign") {
    const Grid g = make_grid({8, 8}, {tp, tp});
    SUBCASE("mode 0 annihilated") {
        const auto l = symbol_l(g, 0.3, 1.2, 0.01);
        CHECK(l[0] == 0.0);
    }
    SUBCASE("alpha = beta = 0 reduces to -|k|^2 p_a") {
        const auto l = symbol_l(g, 0.0, 0.0, 0.5);
        const auto pa = symbol_pa(g, 0.5);
        for (std::int64_t s = 0; s < g.spectral_count; ++s)
            CHECK(l[static_cast<std::size_t>(s)] ==
                  doctest::Approx(-g.k_squared[static_cast<std::size_t>(s)] *
                                  pa[static_cast<std::size_t>(s)])
                      .epsilon(1e-14));
    }
    SUBCASE("|k| = 1, alpha=0, beta=1, a=0 gives -1") {
        const auto l = symbol_l(g, 0.0, 1.0, 0.0);
        CHECK(l[1] == doctest::Approx(-1.0).epsilon(1e-14));
    }
    SUBCASE("l <= 0 and stage denominators >= 1 for the default stabilizers") {
        const auto l = symbol_l(g, 0.0, 1.0, 0.001);
        for (double v : l) CHECK(v <= 0.0);
    }
}

TEST_CASE("symbols depend only on |k|^2 (even in k)") {
    const Grid g = make_grid({12, 12}, {3.0, 7.0});
    const auto pa = symbol_pa(g, 0.3);
    const auto l = symbol_l(g, 0.2, 0.9, 0.3);
    for (std::int64_t s = 0; s < g.spectral_count; ++s) {
        int kx, ky, kz;
        g.spectral_coords(s, kx, ky, kz);
        if (ky == 0) continue;
        const std::int64_t mirror = kx + static_cast<std::int64_t>(g.half_nx) * (g.dims[1] - ky);
        CHECK(pa[static_cast<std::size_t>(s)] == pa[static_cast<std::size_t>(mirror)]);
        CHECK(l[static_cast<std::size_t>(s)] == l[static_cast<std::size_t>(mirror)]);
    }
}

TEST_CASE("applying the P_a symbol matches the analytic (Lap+I)^2 of a cosine") {
    for (double len : {8.0, 32.0, 100.0}) {
        const Grid g = make_grid({32}, {len});
        FftWorkspace fft(g);
        Field f(g);
        for (int x = 0; x < 32; ++x) f[x] = std::cos(tp * g.coord(0, x) / len);
        SpectralField sf = fft.forward(f);
        const auto pa = symbol_pa(g, 0.0);
        for (std::size_t s = 0; s < sf.coeffs.size(); ++s) sf.coeffs[s] *= pa[s];
        const Field out = fft.inverse(sf);

        const double k2 = (tp / len) * (tp / len);
        const double factor = (1.0 - k2) * (1.0 - k2);
        for (int x = 0; x < 32; ++x)
            CHECK(out[x] == doctest::Approx(factor * f[x]).epsilon(1e-10));
    }
}

TEST_CASE("stage_solve") {
    const Grid g = make_grid({8, 8}, {tp, tp});
    const auto l = symbol_l(g, 0.0, 1.0, 0.0);
    SpectralField rhs(g);
    for (std::size_t s = 0; s < rhs.coeffs.size(); ++s)
        rhs.coeffs[s] = {static_cast<double>(s % 5) - 2.0, 0.5};

    SUBCASE("tau = 0 is the identity") {
        const SpectralField out = stage_solve(rhs, 0.0, 1.0, l);
        for (std::size_t s = 0; s < out.coeffs.size(); ++s) CHECK(out.coeffs[s] == rhs.coeffs[s]);
    }
    SUBCASE("mode 0 unchanged") {
        const SpectralField out = stage_solve(rhs, 3.7, 0.9, l);
        CHECK(out.coeffs[0] == rhs.coeffs[0]);
    }
    SUBCASE("single |k|=1 mode halves at tau = aii = 1") {
        SpectralField one(g);
        one.coeffs[1] = {1.0, 0.0};
        const SpectralField out = stage_solve(one, 1.0, 1.0, l);
        CHECK(out.coeffs[1].real() == doctest::Approx(0.5).epsilon(1e-14));
    }
    SUBCASE("denominators >= 1 under the default stabilizers") {
        for (double v : l) CHECK(1.0 - 2.0 * 0.8 * v >= 1.0);
    }
}

TEST_CASE("dealias mask zeroes the top third of modes") {
    const Grid g = make_grid({12}, {tp});
    const auto mask = dealias_mask(g);
    // modes 0..4 kept (3*4 = 12 <= 12), 5 and 6 zeroed
    for (int kx = 0; kx <= 4; ++kx) CHECK(mask[static_cast<std::size_t>(kx)] == 1.0);
    CHECK(mask[5] == 0.0);
    CHECK(mask[6] == 0.0);
}
