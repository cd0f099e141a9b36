#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pfc/certify.hpp"
#include "pfc/fft.hpp"
#include "pfc/field.hpp"
#include "pfc/model.hpp"
#include "pfc/symbols.hpp"
#include "pfc/tableau.hpp"

namespace pfc {

struct DiagnosticsRecord {
    long step = 0;
    double t = 0.0;
    double energy = 0.0;
    double mass = 0.0;
    double max_norm = 0.0;
    double energy_delta = 0.0;
    bool bound_violated = false;
};

/// Append-only diagnostics consumer. run() flushes at least every 100 rows.
class DiagnosticsSink {
  public:
    virtual ~DiagnosticsSink() = default;
    virtual void append(const DiagnosticsRecord& rec) = 0;
    virtual void flush() {}
};

class VectorSink : public DiagnosticsSink {
  public:
    void append(const DiagnosticsRecord& rec) override { records.push_back(rec); }
    std::vector<DiagnosticsRecord> records;
};

/// IMEX Runge-Kutta time integrator for the stabilized PFC splitting
/// phi_t = L phi + N(phi), with L diagonal in Fourier space. The nonlinearity
/// always goes through the truncated f; disabling truncation means m0 = +inf,
/// which takes the identical code path through the |phi| <= m0 branch.
class Stepper {
  public:
    Stepper(const Grid& grid, const ImexTableau& tab, const ModelParams& params, bool dealias = false)
        : grid_(grid), tab_(tab), params_(params), fft_(grid),
          lsym_(symbol_l(grid, params.alpha, params.beta, params.a)),
          pa_(symbol_pa(grid, params.a)) {
        const ValidationReport rep = validate_tableau(tab);
        if (!rep.pass) throw structural_error("stepper: tableau fails validation");
        if (dealias) mask_ = dealias_mask(grid);
    }

    void set_state(Field phi0, double t0 = 0.0) {
        if (!phi0.grid.same_layout(grid_)) throw structural_error("stepper: field grid mismatch");
        if (!all_finite(phi0)) throw numeric_error("stepper: non-finite initial field");
        phi_ = std::move(phi0);
        phi_hat_ = fft_.forward(phi_);
        t_ = t0;
        step_index_ = 0;
        prev_energy_ = current_energy();
        bound_violated_ = check_bound(phi_);
    }

    const Field& phi() const { return phi_; }
    double time() const { return t_; }
    long step_index() const { return step_index_; }
    double energy() const { return prev_energy_; }
    const ModelParams& params() const { return params_; }
    const std::vector<double>& l_symbol() const { return lsym_; }
    long stage_solve_count() const { return n_stage_solves_; }
    long nonlinear_eval_count() const { return n_nonlinear_evals_; }

    /// N(u) in Fourier space: |k|^2 (-fhat + (alpha p_a + beta) uhat).
    /// Mode 0 is exactly zero, which is what conserves the mass.
    SpectralField eval_n(const Field& u) { return eval_n_with_spectral(u, fft_.forward(u)); }

    DiagnosticsRecord step(double tau) {
        if (!(tau > 0.0) || !std::isfinite(tau)) throw config_error("step: tau must be positive");
        const int s = tab_.s;

        std::vector<SpectralField> l_times_u(static_cast<std::size_t>(s));
        std::vector<SpectralField> nhat(static_cast<std::size_t>(s));
        const Field* u_prev = &phi_;
        const SpectralField* u_prev_hat = &phi_hat_;
        Field u_stage;
        SpectralField u_stage_hat;
        bool violated = bound_violated_;

        for (int i = 0; i < s; ++i) {
            nhat[static_cast<std::size_t>(i)] = eval_n_with_spectral(*u_prev, *u_prev_hat);

            SpectralField rhs = phi_hat_;
            for (int j = 0; j < i; ++j) {
                const double aij = tab_.a(i, j);
                if (aij == 0.0) continue;
                const auto& lu = l_times_u[static_cast<std::size_t>(j)].coeffs;
                for (std::size_t k = 0; k < rhs.coeffs.size(); ++k) rhs.coeffs[k] += tau * aij * lu[k];
            }
            for (int j = 0; j <= i; ++j) {
                const double hij = tab_.ahat(i, j);
                if (hij == 0.0) continue;
                const auto& nj = nhat[static_cast<std::size_t>(j)].coeffs;
                for (std::size_t k = 0; k < rhs.coeffs.size(); ++k) rhs.coeffs[k] += tau * hij * nj[k];
            }

            u_stage_hat = stage_solve(rhs, tau, tab_.a(i, i), lsym_);
            ++n_stage_solves_;

            l_times_u[static_cast<std::size_t>(i)] = u_stage_hat;
            auto& lu = l_times_u[static_cast<std::size_t>(i)].coeffs;
            for (std::size_t k = 0; k < lu.size(); ++k) lu[k] *= lsym_[k];

            u_stage = fft_.inverse(u_stage_hat);
            if (!all_finite(u_stage))
                throw numeric_error("numeric blowup at step " + std::to_string(step_index_ + 1) +
                                    ", stage " + std::to_string(i + 1));
            violated = violated || check_bound(u_stage);
            u_prev = &u_stage;
            u_prev_hat = &u_stage_hat;
        }

        phi_ = std::move(u_stage);
        phi_hat_ = std::move(u_stage_hat);
        t_ += tau;
        ++step_index_;
        bound_violated_ = violated;

        DiagnosticsRecord rec;
        rec.step = step_index_;
        rec.t = t_;
        rec.energy = current_energy();
        rec.mass = mass(phi_);
        rec.max_norm = max_norm(phi_);
        rec.energy_delta = rec.energy - prev_energy_;
        rec.bound_violated = violated;
        prev_energy_ = rec.energy;
        return rec;
    }

    DiagnosticsRecord initial_record() const {
        DiagnosticsRecord rec;
        rec.step = 0;
        rec.t = t_;
        rec.energy = prev_energy_;
        rec.mass = mass(phi_);
        rec.max_norm = max_norm(phi_);
        rec.energy_delta = 0.0;
        rec.bound_violated = bound_violated_;
        return rec;
    }

  private:
    double current_energy() { return energy_with_spectral(phi_, phi_hat_, params_, params_.truncation_enabled()); }

    bool check_bound(const Field& u) const {
        return params_.truncation_enabled() && max_norm(u) > params_.m0;
    }

    SpectralField eval_n_with_spectral(const Field& u, const SpectralField& uhat) {
        Field fval(u.grid);
        for (std::size_t i = 0; i < u.data.size(); ++i) fval.data[i] = f_trunc(u.data[i], params_);
        if (!all_finite(fval))
            throw numeric_error("non-finite nonlinearity at step " + std::to_string(step_index_ + 1));
        SpectralField fhat = fft_.forward(fval);
        ++n_nonlinear_evals_;
        if (!mask_.empty())
            for (std::size_t k = 0; k < fhat.coeffs.size(); ++k) fhat.coeffs[k] *= mask_[k];

        SpectralField out(u.grid);
        for (std::size_t k = 0; k < out.coeffs.size(); ++k) {
            const double k2 = grid_.k_squared[k];
            out.coeffs[k] = k2 * (-fhat.coeffs[k] +
                                  (params_.alpha * pa_[k] + params_.beta) * uhat.coeffs[k]);
        }
        return out;
    }

    Grid grid_;
    ImexTableau tab_;
    ModelParams params_;
    FftWorkspace fft_;
    std::vector<double> lsym_;
    std::vector<double> pa_;
    std::vector<double> mask_;

    Field phi_;
    SpectralField phi_hat_;
    double t_ = 0.0;
    long step_index_ = 0;
    double prev_energy_ = 0.0;
    bool bound_violated_ = false;
    long n_stage_solves_ = 0;
    long n_nonlinear_evals_ = 0;
};

struct RunOptions {
    double tau = 0.1;
    double t_final = 1.0;
    long diagnostics_every = 1;  // record cadence in steps
    long snapshot_every = 0;     // 0 = final snapshot only
    bool strict_bounds = false;  // abort on truncation-bound violation
};

using SnapshotHook = std::function<void(const Field&, long step, double t)>;

/// Number of steps implied by (tau, t_final); rejects non-commensurate pairs.
inline long resolve_step_count(double tau, double t_final) {
    if (!(tau > 0.0)) throw config_error("tau must be positive");
    if (t_final < 0.0) throw config_error("t_final must be nonnegative");
    const double n = t_final / tau;
    const long rounded = static_cast<long>(std::llround(n));
    if (std::abs(n - static_cast<double>(rounded)) > 1e-9 * std::max(1.0, n))
        throw config_error("t_final must be an integer multiple of tau");
    return rounded;
}

/// Drive the stepper to t_final, streaming diagnostics and snapshots.
/// Partial diagnostics are flushed before any error propagates.
inline Field run(Stepper& stepper, const RunOptions& opt, DiagnosticsSink& sink,
                 const SnapshotHook& snapshot = {}) {
    const long n_steps = resolve_step_count(opt.tau, opt.t_final);
    long unflushed = 0;
    auto emit = [&](const DiagnosticsRecord& rec) {
        sink.append(rec);
        if (++unflushed >= 100) {
            sink.flush();
            unflushed = 0;
        }
    };

    emit(stepper.initial_record());
    if (snapshot) snapshot(stepper.phi(), 0, stepper.time());
    try {
        for (long n = 1; n <= n_steps; ++n) {
            const DiagnosticsRecord rec = stepper.step(opt.tau);
            if (opt.diagnostics_every > 0 && (n % opt.diagnostics_every == 0 || n == n_steps))
                emit(rec);
            if (snapshot && opt.snapshot_every > 0 && n % opt.snapshot_every == 0 && n != n_steps)
                snapshot(stepper.phi(), n, stepper.time());
            if (opt.strict_bounds && rec.bound_violated)
                throw numeric_error("truncation bound violated at step " + std::to_string(n) +
                                    " (strict mode)");
        }
    } catch (...) {
        sink.flush();
        throw;
    }
    sink.flush();
    if (snapshot && n_steps > 0) snapshot(stepper.phi(), n_steps, stepper.time());
    return stepper.phi();
}

} // namespace pfc
