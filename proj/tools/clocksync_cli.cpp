// Command-line front end: design, simulate, verify, plot.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "clocksync/batch.hpp"
#include "clocksync/certificate.hpp"
#include "clocksync/errors.hpp"
#include "clocksync/harness.hpp"
#include "clocksync/multi_agent.hpp"

using namespace clocksync;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitVerify = 4;

int exit_code_for(const Error& e) {
    switch (e.code()) {
    case ErrorCode::Infeasible:
    case ErrorCode::NoCertificate:
        return kExitInfeasible;
    case ErrorCode::IoError:
    case ErrorCode::ConfigInvalid:
    case ErrorCode::InvalidParams:
    case ErrorCode::InvalidGain:
    case ErrorCode::InvalidCertificateInput:
    case ErrorCode::VerifyInputMismatch:
        return kExitConfig;
    default:
        return 1;
    }
}

void save(const ScenarioResult& res, const std::string& path) {
    if (res.multi)
        write_trajectory(res.mtraj, path);
    else
        write_trajectory(res.traj, path);
}

void plot(const ScenarioResult& res, const std::string& prefix) {
    if (res.multi)
        emit_plot_data(res.mtraj, prefix);
    else
        emit_plot_data(res.traj, prefix);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adaptive two-way clock synchronization: simulation and Lyapunov certificates"};
    app.require_subcommand(1);

    double c = 0, d = 0, mu = 0, q_scale = 1.0;
    bool multi = false;
    std::string out;
    auto* design = app.add_subcommand("design", "Design P and write a certificate");
    design->add_option("--c", c, "Residence delay (s)")->required();
    design->add_option("--d", d, "Propagation delay (s)")->required();
    design->add_option("--mu", mu, "Rate gain")->required();
    std::vector<double> weight;
    auto* qs_opt = design->add_option("--q-scale", q_scale, "Right-hand side scale of the Lyapunov equation");
    design->add_option("--weight", weight, "Right-hand side weight q11,q12,q22 of the Lyapunov equation")
        ->expected(3)
        ->delimiter(',')
        ->excludes(qs_opt);
    design->add_flag("--multi", multi, "Use the round-robin cycle length 3c+3d");
    design->add_option("-o,--output", out, "Certificate JSON path")->required();

    std::string config, cert_path, traj_path, plot_prefix;
    std::vector<std::string> batch;
    auto* simulate = app.add_subcommand("simulate", "Run a scenario");
    auto* cfg_opt = simulate->add_option("--config", config, "Scenario JSON");
    auto* batch_opt = simulate->add_option("--batch", batch, "Several scenario JSON files, run in parallel");
    cfg_opt->excludes(batch_opt);
    simulate->add_option("--cert", cert_path, "Certificate JSON");
    simulate->add_option("-o,--output", traj_path, "Trajectory CSV path");
    simulate->add_option("--plot", plot_prefix, "Also write plot series with this prefix");

    std::string vtraj, vcert;
    auto* verify = app.add_subcommand("verify", "Check a trajectory against a certificate");
    verify->add_option("--traj", vtraj, "Trajectory CSV")->required();
    verify->add_option("--cert", vcert, "Certificate JSON")->required();

    std::string ptraj, pprefix;
    auto* plotcmd = app.add_subcommand("plot", "Write error and Lyapunov series");
    plotcmd->add_option("--traj", ptraj, "Trajectory CSV")->required();
    plotcmd->add_option("-o,--output", pprefix, "Output prefix")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    try {
        if (*design) {
            const double horizon = multi ? cycle_length(c, d) : two_agent_horizon(d);
            const Matrix2 P = weight.empty()
                                  ? design_p_at(c, d, mu, q_scale, horizon)
                                  : design_p_at(c, d, mu, Matrix2::symmetric(weight[0], weight[1], weight[2]), horizon);
            const Certificate cert = convergence_factors_at(P, c, d, mu, horizon);
            write_certificate(cert, out);
            std::cout << certificate_to_json(cert);
            return kExitOk;
        }
        if (*simulate) {
            if (!batch.empty()) {
                std::vector<ScenarioConfig> cfgs;
                for (const auto& path : batch) {
                    cfgs.push_back(parse_config(path));
                    if (!cfgs.back().trajectory_out)
                        throw Error(ErrorCode::ConfigInvalid, path + ": batch runs need outputs.trajectory");
                }
                const auto results = run_batch(cfgs);
                bool ok = true;
                for (std::size_t i = 0; i < results.size(); ++i) {
                    save(results[i], *cfgs[i].trajectory_out);
                    if (cfgs[i].plot_prefix)
                        plot(results[i], *cfgs[i].plot_prefix);
                    std::cout << "== " << batch[i] << "\n" << results[i].report.to_string();
                    ok = ok && results[i].report.ok();
                }
                return ok ? kExitOk : kExitVerify;
            }
            if (config.empty())
                throw Error(ErrorCode::ConfigInvalid, "simulate needs --config or --batch");
            ScenarioConfig cfg = parse_config(config);
            if (!cert_path.empty())
                cfg.certificate = cert_path;
            if (!traj_path.empty())
                cfg.trajectory_out = traj_path;
            if (!plot_prefix.empty())
                cfg.plot_prefix = plot_prefix;
            if (!cfg.trajectory_out)
                throw Error(ErrorCode::ConfigInvalid, "no trajectory output path (-o or outputs.trajectory)");
            const ScenarioResult res = run_scenario(cfg);
            save(res, *cfg.trajectory_out);
            if (cfg.plot_prefix)
                plot(res, *cfg.plot_prefix);
            std::cout << res.report.to_string();
            return kExitOk;
        }
        if (*verify) {
            const Certificate cert = read_certificate(vcert);
            VerificationReport rep;
            if (is_multi_csv(vtraj))
                rep = verify_multi(read_multi_trajectory(vtraj), &cert);
            else
                rep = verify_trajectory(read_trajectory(vtraj), &cert);
            std::cout << rep.to_string();
            return rep.ok() ? kExitOk : kExitVerify;
        }
        if (*plotcmd) {
            if (is_multi_csv(ptraj))
                emit_plot_data(read_multi_trajectory(ptraj), pprefix);
            else
                emit_plot_data(read_trajectory(ptraj), pprefix);
            return kExitOk;
        }
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitOk;
}
