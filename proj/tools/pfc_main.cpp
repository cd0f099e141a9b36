#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "pfc/certify.hpp"
#include "pfc/config.hpp"
#include "pfc/harness.hpp"
#include "pfc/io.hpp"
#include "pfc/stepper.hpp"

namespace {

// 0 = success, 1 = certification failure (strict), 2 = numeric blowup,
// 3 = configuration error
constexpr int kExitCertification = 1;
constexpr int kExitNumeric = 2;
constexpr int kExitConfig = 3;

nlohmann::json certificate_to_json(const pfc::StabilizerCertificate& cert) {
    nlohmann::json j;
    j["s"] = cert.s;
    j["alpha"] = cert.alpha;
    j["beta"] = cert.beta;
    j["lipschitz"] = cert.lip;
    j["lambda_min_Qbar"] = cert.lambda_min_Qbar;
    j["lambda_min_H0bar"] = cert.lambda_min_H0bar;
    j["alpha_min"] = cert.alpha_min;
    j["beta_min"] = cert.beta_min;
    j["submatrix_pd"] = {{"Qbar", cert.q_pd}, {"H0bar", cert.h0_pd},
                         {"H1bar", cert.h1_pd}, {"H2bar", cert.h2_pd}};
    j["admissible"] = cert.admissible;
    if (!cert.reason.empty()) j["reason"] = cert.reason;
    return j;
}

int cmd_certify(const std::string& tableau_path, double alpha, double beta, double lip) {
    const pfc::ImexTableau tab = pfc::load_tableau(tableau_path);
    const pfc::ValidationReport rep = pfc::validate_tableau(tab);
    nlohmann::json out;
    out["tableau"] = tab.name;
    out["validation"] = nlohmann::json::array();
    for (const auto& chk : rep.checks)
        out["validation"].push_back({{"condition", chk.name}, {"pass", chk.pass}, {"residual", chk.residual}});
    if (!rep.pass) {
        out["admissible"] = false;
        out["reason"] = "tableau fails structural validation";
        std::cout << out.dump(2) << "\n";
        return kExitCertification;
    }
    const pfc::StabilizerCertificate cert = pfc::certify(tab, alpha, beta, lip);
    out["certificate"] = certificate_to_json(cert);
    std::cout << out.dump(2) << "\n";
    return cert.admissible ? 0 : kExitCertification;
}

void write_config_echo(const pfc::RunConfig& cfg, const pfc::ModelParams& params,
                       const std::filesystem::path& dir) {
    pfc::RunConfig resolved = cfg;
    resolved.m0 = params.m0;
    std::filesystem::create_directories(dir);
    std::ofstream echo(dir / "config.echo");
    echo << pfc::config_to_json(resolved).dump(2) << "\n";
}

int cmd_run(const std::string& config_path) {
    const pfc::RunConfig cfg = pfc::parse_config(config_path);
    const pfc::Grid grid = pfc::make_grid(cfg.dims, cfg.lengths);
    const pfc::ImexTableau tab = pfc::load_tableau(cfg.tableau_path);

    const pfc::Field phi0 = pfc::build_initial_field(grid, cfg.experiment);
    const pfc::ModelParams params = pfc::resolve_params(cfg, phi0);

    const pfc::StabilizerCertificate cert = pfc::certify(tab, params.alpha, params.beta, params.lip);
    if (!cert.admissible) {
        std::cerr << "warning: stabilizers not certified (" << cert.reason
                  << "); alpha_min=" << cert.alpha_min << " beta_min=" << cert.beta_min << "\n";
        if (cfg.strict) {
            std::cerr << "strict mode: aborting on inadmissible certificate\n";
            return kExitCertification;
        }
    }

    const std::filesystem::path out_dir(cfg.output_dir);
    write_config_echo(cfg, params, out_dir);
    pfc::CsvDiagnosticsSink sink((out_dir / "diagnostics.csv").string());

    pfc::Stepper stepper(grid, tab, params, cfg.dealias);
    stepper.set_state(phi0);

    pfc::RunOptions opt;
    opt.tau = cfg.tau;
    opt.t_final = cfg.t_final;
    opt.diagnostics_every = cfg.diagnostics_every;
    opt.snapshot_every = cfg.snapshot_every;
    opt.strict_bounds = cfg.strict;

    auto snapshot = [&](const pfc::Field& f, long step, double t) {
        pfc::write_snapshot(out_dir, f, step, t, params);
    };
    const pfc::Field final_field = pfc::run(stepper, opt, sink, snapshot);

    std::cout << "steps=" << stepper.step_index() << " t=" << stepper.time()
              << " energy=" << pfc::format_double(stepper.energy())
              << " mass=" << pfc::format_double(pfc::mass(final_field)) << "\n";
    return 0;
}

int cmd_converge(const std::string& config_path) {
    const pfc::RunConfig cfg = pfc::parse_config(config_path);
    const pfc::Grid grid = pfc::make_grid(cfg.dims, cfg.lengths);
    const pfc::ImexTableau tab = pfc::load_tableau(cfg.tableau_path);

    std::vector<double> taus = cfg.experiment.tau_list;
    if (taus.empty())
        for (int k = 4; k <= 8; ++k) taus.push_back(std::pow(2.0, -k));

    const pfc::Field phi0 = pfc::build_initial_field(grid, cfg.experiment);
    const pfc::ModelParams params = pfc::resolve_params(cfg, phi0);

    const pfc::ConvergenceTable table = pfc::convergence_study(
        grid, tab, params, phi0, taus, cfg.t_final, pfc::effective_threads(cfg), cfg.dealias);

    const std::filesystem::path out_dir(cfg.output_dir);
    write_config_echo(cfg, params, out_dir);
    std::ofstream csv(out_dir / "rates.csv");
    csv << "tau,cauchy_error,rate\n";
    std::printf("%12s %16s %8s\n", "tau", "cauchy_error", "rate");
    for (const auto& row : table.rows) {
        csv << pfc::format_double(row.tau) << ',' << pfc::format_double(row.error) << ','
            << (std::isnan(row.rate) ? "" : pfc::format_double(row.rate)) << "\n";
        std::printf("%12.6g %16.6e %8.4f\n", row.tau, row.error, row.rate);
    }
    return 0;
}

int cmd_render(const std::string& snapshot_path, const std::string& out_path, bool fixed_range,
               double range_min, double range_max) {
    const pfc::Snapshot snap = pfc::read_snapshot(snapshot_path);
    pfc::render_pgm(snap, out_path, fixed_range, range_min, range_max);
    std::cout << "wrote " << out_path << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fourier-pseudospectral phase field crystal solver with certified "
                 "IMEX Runge-Kutta time integration"};
    app.require_subcommand(1);

    std::string tableau_path, config_path, snapshot_path, out_path;
    double alpha = 0.0, beta = 1.0, lip = 0.0;

    auto* certify = app.add_subcommand("certify", "certify stabilizers for a tableau");
    certify->add_option("--tableau", tableau_path, "tableau JSON file")->required();
    certify->add_option("--alpha", alpha, "stabilizer alpha")->required();
    certify->add_option("--beta", beta, "stabilizer beta")->required();
    certify->add_option("--lipschitz", lip, "Lipschitz constant of the truncated nonlinearity")
        ->required();

    auto* run_cmd = app.add_subcommand("run", "run an experiment from a config file");
    run_cmd->add_option("--config", config_path, "config JSON file")->required();

    auto* converge = app.add_subcommand("converge", "temporal convergence study");
    converge->add_option("--config", config_path, "config JSON file")->required();

    auto* render = app.add_subcommand("render", "render a 2D snapshot to grayscale PGM");
    render->add_option("--snapshot", snapshot_path, "field_<step>.f64 file")->required();
    render->add_option("--out", out_path, "output image path")->required();
    double range_min = 0.0, range_max = 1.0;
    auto* min_opt = render->add_option("--min", range_min, "fixed-range minimum");
    auto* max_opt = render->add_option("--max", range_max, "fixed-range maximum");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (app.got_subcommand(certify)) return cmd_certify(tableau_path, alpha, beta, lip);
        if (app.got_subcommand(run_cmd)) return cmd_run(config_path);
        if (app.got_subcommand(converge)) return cmd_converge(config_path);
        if (app.got_subcommand(render)) {
            const bool fixed = min_opt->count() > 0 || max_opt->count() > 0;
            return cmd_render(snapshot_path, out_path, fixed, range_min, range_max);
        }
    } catch (const pfc::numeric_error& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const pfc::config_error& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const pfc::structural_error& e) {
        std::cerr << "structural error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
    return 0;
}
