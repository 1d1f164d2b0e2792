// udw-sweep: closed-form scans, oracle verification and identity checks.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "udw/sweep.hpp"

namespace {

struct Overrides {
    std::string config;
    std::string model, statistics, omega, sigma, mass, theta, mix, out, format, tier;
    int n = 0;
    double k0 = 0.0, lambda = 0.0, delta = 0.0, oracle_tol = 0.0, oracle_T0 = 0.0;
    int workers = 0;
};

void add_grid_options(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config, "JSON configuration file")->check(CLI::ExistingFile);
    cmd->add_option("--model", o.model, "real | vector | fermion | complex");
    cmd->add_option("--n", o.n, "spatial dimension (real and complex scalar)");
    cmd->add_option("--statistics", o.statistics, "bose | fermi (complex scalar)");
    cmd->add_option("--omega", o.omega, "detector gap grid: x | a,b,c | start:stop:count[:log]");
    cmd->add_option("--sigma", o.sigma, "wavepacket width grid");
    cmd->add_option("--mass", o.mass, "field mass grid");
    cmd->add_option("--theta", o.theta, "dipole angle grid (vector); accepts pi/N");
    cmd->add_option("--mix", o.mix, "weight of the coupling amplitude, in [0, 1]");
    cmd->add_option("--k0", o.k0, "wavepacket centre momentum");
    cmd->add_option("--lambda", o.lambda, "coupling constant");
    cmd->add_option("--delta", o.delta, "smearing length scale (vector, fermion)");
    cmd->add_option("--out", o.out, "output path, '-' for stdout");
    cmd->add_option("--format", o.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--workers", o.workers, "worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--oracle-tol", o.oracle_tol, "relative tolerance of the adiabatic oracle");
    cmd->add_option("--oracle-T0", o.oracle_T0, "initial switching time of the oracle");
    cmd->add_option("--oracle-tier", o.tier, "analytic | numeric angular integrals")
        ->check(CLI::IsMember({"analytic", "numeric"}));
}

udw::SweepConfig build_config(CLI::App* cmd, const Overrides& o, bool verify) {
    udw::SweepConfig cfg = o.config.empty() ? udw::SweepConfig{} : udw::load_config(o.config);
    auto given = [&](const char* name) { return cmd->count(name) > 0; };
    if (given("--model")) {
        cfg.model.kind = udw::parse_field_kind(o.model);
        if (cfg.model.kind == udw::FieldKind::Vector || cfg.model.kind == udw::FieldKind::Fermion) cfg.model.n = 3;
    }
    if (given("--n")) cfg.model.n = o.n;
    if (given("--statistics")) cfg.model.statistics = udw::parse_statistics(o.statistics);
    if (given("--omega")) cfg.omega = udw::Range::parse(o.omega);
    if (given("--sigma")) cfg.sigma = udw::Range::parse(o.sigma);
    if (given("--mass")) cfg.mass = udw::Range::parse(o.mass);
    if (given("--theta")) cfg.theta = udw::Range::parse(o.theta);
    if (given("--mix")) cfg.mix = udw::Range::parse(o.mix);
    if (given("--k0")) cfg.k0 = o.k0;
    if (given("--lambda")) cfg.lambda = o.lambda;
    if (given("--delta")) cfg.delta = o.delta;
    if (given("--out")) cfg.output_path = o.out;
    if (given("--format")) cfg.format = o.format == "json" ? udw::OutputFormat::Json : udw::OutputFormat::Csv;
    if (given("--workers")) cfg.workers = o.workers;
    if (verify && !cfg.oracle) cfg.oracle = udw::OracleSettings{};
    if (cfg.oracle) {
        if (given("--oracle-tol")) cfg.oracle->tol = o.oracle_tol;
        if (given("--oracle-T0")) cfg.oracle->start_T = o.oracle_T0;
        if (given("--oracle-tier"))
            cfg.oracle->quadrature.tier =
                o.tier == "numeric" ? udw::OracleTier::FullyNumeric : udw::OracleTier::AnalyticAngular;
    }
    udw::apply_default_amplitudes(cfg);
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Detector response to Gaussian wavepackets: scans, oracle verification, identities"};
    app.require_subcommand(1);

    Overrides scan_opts, verify_opts;
    auto* scan = app.add_subcommand("scan", "evaluate the closed forms over a grid");
    add_grid_options(scan, scan_opts);
    auto* verify = app.add_subcommand("verify", "compare closed forms with the finite-time oracle");
    add_grid_options(verify, verify_opts);
    int max_n = 5;
    auto* identities = app.add_subcommand("identities", "run the identity and bound checks");
    identities->add_option("--max-n", max_n, "largest dimension for the angular identity (<= 6)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : udw::exit_validation;
    }

    try {
        if (scan->parsed()) return udw::cmd_scan(build_config(scan, scan_opts, false), std::cout, std::cerr);
        if (verify->parsed()) return udw::cmd_verify(build_config(verify, verify_opts, true), std::cout, std::cerr);
        if (identities->parsed()) return udw::cmd_identities(max_n, std::cout);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return udw::exit_validation;
    } catch (const udw::NonConvergenceError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return udw::exit_nonconvergence;
    }
    return udw::exit_validation;
}
