#pragma once

#include <cmath>
#include <thread>
#include <vector>

#include "pfc/config.hpp"
#include "pfc/errors.hpp"
#include "pfc/ic.hpp"
#include "pfc/model.hpp"
#include "pfc/stepper.hpp"

namespace pfc {

/// Tri-crystal layout: three patches across the horizontal midline, scaled to
/// the domain the way the reference 512^2 setup places them at x = L/4, L/2,
/// 3L/4, y = L/2, with orientations -pi/4, 0, pi/4.
inline std::vector<CrystalPatch> default_crystal_patches(const Grid& grid, double size = 30.0) {
    const double lx = grid.lengths[0], ly = grid.lengths[1];
    return {{0.25 * lx, 0.5 * ly, size, -std::numbers::pi / 4.0},
            {0.50 * lx, 0.5 * ly, size, 0.0},
            {0.75 * lx, 0.5 * ly, size, std::numbers::pi / 4.0}};
}

inline Field build_initial_field(const Grid& grid, const ExperimentSpec& e) {
    switch (e.kind) {
        case ExperimentKind::converge:
            return ic_converge(grid);
        case ExperimentKind::energy_study:
            return ic_energy_study(grid);
        case ExperimentKind::random2d:
            if (grid.ndim != 2) throw config_error("random2d requires a 2D grid");
            return ic_random(grid, e.base, e.amp, e.seed);
        case ExperimentKind::random3d:
            if (grid.ndim != 3) throw config_error("random3d requires a 3D grid");
            return ic_random(grid, e.base, e.amp, e.seed);
        case ExperimentKind::crystal_growth: {
            const auto patches = e.patches.empty() ? default_crystal_patches(grid) : e.patches;
            return ic_crystal_growth(grid, e.phibar, e.capc, e.lattice_p, patches);
        }
        case ExperimentKind::pattern:
            return ic_pattern(grid, e.psi0, e.seed, e.hex_radius);
    }
    throw config_error("unhandled experiment kind");
}

/// Resolve the truncation bound: configured value, or the default rule from
/// the initial field.
inline ModelParams resolve_params(const RunConfig& cfg, const Field& phi0) {
    const double m0 = cfg.m0 ? *cfg.m0 : default_truncation_bound(phi0);
    return ModelParams::make(cfg.epsilon, cfg.a, cfg.alpha, cfg.beta, cfg.r, m0);
}

namespace detail {
/// Run jobs [0, count) on up to `threads` workers.
template <typename Fn>
void parallel_for_jobs(int count, int threads, Fn&& fn) {
    threads = std::max(1, std::min(threads, count));
    if (threads == 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int w = 0; w < threads; ++w)
        pool.emplace_back([&]() {
            for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
        });
    for (auto& th : pool) th.join();
}
} // namespace detail

struct ConvergenceRow {
    double tau = 0.0;
    double error = 0.0; // Cauchy l_inf error against the tau/2 run
    double rate = std::numeric_limits<double>::quiet_NaN();
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;
};

/// Temporal convergence by Cauchy errors: run the same initial data at each
/// tau in a halving sequence plus one extra refinement, difference successive
/// finals in l_inf, and report observed orders.
inline ConvergenceTable convergence_study(const Grid& grid, const ImexTableau& tab,
                                          const ModelParams& params, const Field& phi0,
                                          std::vector<double> tau_list, double t_final,
                                          int threads = 1, bool dealias = false) {
    if (tau_list.size() < 3) throw config_error("convergence study needs at least 3 tau values");
    for (std::size_t i = 1; i < tau_list.size(); ++i)
        if (std::abs(tau_list[i] - 0.5 * tau_list[i - 1]) > 1e-12 * tau_list[i - 1])
            throw config_error("convergence study requires a halving tau sequence");

    std::vector<double> taus = tau_list;
    taus.push_back(tau_list.back() * 0.5);
    std::vector<Field> finals(taus.size());
    std::vector<std::string> failures(taus.size());

    detail::parallel_for_jobs(static_cast<int>(taus.size()), threads, [&](int i) {
        try {
            Stepper stepper(grid, tab, params, dealias);
            stepper.set_state(phi0);
            const long n = resolve_step_count(taus[static_cast<std::size_t>(i)], t_final);
            for (long k = 0; k < n; ++k) stepper.step(taus[static_cast<std::size_t>(i)]);
            finals[static_cast<std::size_t>(i)] = stepper.phi();
        } catch (const std::exception& e) {
            failures[static_cast<std::size_t>(i)] = e.what();
        }
    });
    for (const auto& f : failures)
        if (!f.empty()) throw numeric_error("convergence run failed: " + f);

    ConvergenceTable table;
    for (std::size_t i = 0; i < tau_list.size(); ++i) {
        ConvergenceRow row;
        row.tau = tau_list[i];
        double err = 0.0;
        const auto& fa = finals[i].data;
        const auto& fb = finals[i + 1].data;
        for (std::size_t k = 0; k < fa.size(); ++k) err = std::max(err, std::abs(fa[k] - fb[k]));
        row.error = err;
        if (i > 0) row.rate = std::log2(table.rows.back().error / err);
        table.rows.push_back(row);
    }
    return table;
}

struct EnergySweepEntry {
    StabilizerCombo combo;
    std::vector<DiagnosticsRecord> records;
    double final_energy = 0.0;
    double max_positive_delta = 0.0; // largest energy increase seen, 0 if none
};

/// Energy evolution across stabilizer/time-step combinations, all runs from
/// the identical initial field.
inline std::vector<EnergySweepEntry> energy_sweep(const Grid& grid, const ImexTableau& tab,
                                                  const RunConfig& cfg, const Field& phi0,
                                                  double t_final, int threads = 1) {
    if (cfg.experiment.combos.empty()) throw config_error("energy sweep needs experiment.combos");
    std::vector<EnergySweepEntry> entries(cfg.experiment.combos.size());
    std::vector<std::string> failures(entries.size());

    detail::parallel_for_jobs(static_cast<int>(entries.size()), threads, [&](int i) {
        const auto idx = static_cast<std::size_t>(i);
        const StabilizerCombo combo = cfg.experiment.combos[idx];
        try {
            RunConfig local = cfg;
            local.alpha = combo.alpha;
            local.beta = combo.beta;
            const ModelParams params = resolve_params(local, phi0);
            Stepper stepper(grid, tab, params, cfg.dealias);
            stepper.set_state(phi0);

            VectorSink sink;
            RunOptions opt;
            opt.tau = combo.tau;
            opt.t_final = t_final;
            opt.diagnostics_every = cfg.diagnostics_every;
            run(stepper, opt, sink);

            entries[idx].combo = combo;
            entries[idx].records = std::move(sink.records);
            entries[idx].final_energy = entries[idx].records.back().energy;
            double worst = 0.0;
            for (std::size_t k = 1; k < entries[idx].records.size(); ++k)
                worst = std::max(worst, entries[idx].records[k].energy_delta);
            entries[idx].max_positive_delta = worst;
        } catch (const std::exception& e) {
            failures[idx] = e.what();
        }
    });
    for (const auto& f : failures)
        if (!f.empty()) throw numeric_error("energy sweep run failed: " + f);
    return entries;
}

} // namespace pfc
