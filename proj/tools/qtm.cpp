// qtm.cpp - Command-line harness

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "qtm/fockcheck.hpp"
#include "qtm/linalg.hpp"
#include "qtm/pipeline.hpp"
#include "qtm/spectra.hpp"
#include "qtm/sweep.hpp"

namespace fs = std::filesystem;
using namespace qtm;

namespace {

struct ModelFlags {
    std::string path;
    std::string regime;
    std::string lamb;
};

void add_model_flags(CLI::App* cmd, ModelFlags& f)
{
    cmd->add_option("model", f.path, "Machine description (TOML)")->required();
    cmd->add_option("--regime", f.regime, "Override the master-equation regime")
        ->check(CLI::IsMember({"global", "local"}));
    cmd->add_option("--lamb", f.lamb, "Override the Lamb-shift toggle")->check(CLI::IsMember({"on", "off"}));
}

MachineSpec load(const ModelFlags& f)
{
    MachineSpec spec = load_machine(f.path);
    if (!f.regime.empty()) spec.options.regime = parse_regime(f.regime);
    if (!f.lamb.empty()) spec.options.lamb = f.lamb == "on";
    return spec;
}

// Writes to out_dir/name, or to stdout when out_dir is empty.
void emit(const std::string& out_dir, const std::string& name, const std::string& text)
{
    if (out_dir.empty()) {
        std::cout << text;
        return;
    }
    fs::create_directories(out_dir);
    std::ofstream os(fs::path(out_dir) / name);
    if (!os) throw std::runtime_error("cannot write " + (fs::path(out_dir) / name).string());
    os << text;
}

std::string complex_matrix_csv(const std::string& name, const Eigen::MatrixXcd& m)
{
    std::ostringstream os;
    os.precision(17);
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j)
            os << name << "," << i + 1 << "," << j + 1 << "," << m(i, j).real() << "," << m(i, j).imag() << "\n";
    return os.str();
}

std::vector<double> sample_times(double t_max, int steps)
{
    if (!(t_max >= 0.0) || steps < 1) throw ValidationError("need t_max >= 0 and steps >= 1");
    std::vector<double> t;
    for (int k = 0; k <= steps; ++k) t.push_back(t_max * k / steps);
    return t;
}

int run_steady(const ModelFlags& mf, const std::string& out, std::optional<double> squeeze, bool all_bip)
{
    const MachineSpec spec = load(mf);
    PipelineOptions opts;
    opts.counterfactual_squeeze = squeeze;
    opts.all_bipartitions = all_bip;
    const PipelineResult r = run_pipeline(spec, opts);
    emit(out, "report.txt", format_steady_report(r));
    if (!out.empty()) {
        if (r.cov) emit(out, "covariance.csv", matrix_csv(r.cov->sigma));
        if (r.separability) emit(out, "separability.csv", format_csv(*r.separability));
    }
    return exit_code(r);
}

struct EvolveFlags {
    double t_max{10.0};
    int steps{10};
    std::vector<std::string> coherent;
    std::vector<double> thermal;
};

GaussianState initial_physical(const EvolveFlags& f, Index d)
{
    GaussianState s = GaussianState::vacuum(d, Basis::Physical);
    if (!f.coherent.empty()) {
        if (static_cast<Index>(f.coherent.size()) != d) throw ValidationError("--coherent needs one amplitude per mode");
        for (Index k = 0; k < d; ++k) s.mean(k) = parse_complex(f.coherent[static_cast<std::size_t>(k)]);
    }
    if (!f.thermal.empty()) {
        if (static_cast<Index>(f.thermal.size()) != d) throw ValidationError("--thermal needs one occupation per mode");
        for (Index k = 0; k < d; ++k) {
            if (f.thermal[static_cast<std::size_t>(k)] < 0.0) throw ValidationError("occupation must be >= 0");
            s.n(k, k) = f.thermal[static_cast<std::size_t>(k)];
        }
    }
    s.n += s.mean.conjugate() * s.mean.transpose();
    return s;
}

int run_evolve(const ModelFlags& mf, const EvolveFlags& ef, const std::string& out, std::optional<double> squeeze)
{
    const MachineSpec spec = load(mf);
    const SecularDecomposition dec = decompose(spec);
    MomentDynamics dyn = build_moment_dynamics(dec);
    if (squeeze) {
        const auto [i, j] = squeeze_modes(spec);
        dyn = inject_squeezing(dyn, *squeeze * dyn.total_damping(), i, j);
    }
    const Index d = spec.d();
    const GaussianState s0 = from_physical(initial_physical(ef, d), dec.U, dyn.data.basis);
    std::ostringstream os;
    os.precision(12);
    os << "t";
    for (Index k = 1; k <= d; ++k) os << ",re_mean_" << k << ",im_mean_" << k << ",n_" << k;
    os << ",max_abs_beta\n";
    for (double t : sample_times(ef.t_max, ef.steps)) {
        const GaussianState s = to_physical(evolve(dyn, s0, t), dec.U);
        os << t;
        for (Index k = 0; k < d; ++k) os << "," << s.mean(k).real() << "," << s.mean(k).imag() << "," << s.n(k, k).real();
        os << "," << s.beta.cwiseAbs().maxCoeff() << "\n";
    }
    emit(out, "trajectory.csv", os.str());
    return kExitOk;
}

int run_sweep_cmd(SweepConfig cfg, const std::string& regime, const std::string& lamb, const std::string& out)
{
    if (regime != "both") cfg.regimes = {parse_regime(regime)};
    if (lamb != "both") cfg.lamb = {lamb == "on"};
    const SweepSummary s = run_sweep(cfg);
    emit(out, "sweep.csv", sweep_csv(s));
    const std::string summary = format_sweep_summary(s);
    if (out.empty()) {
        std::cerr << summary;
    } else {
        emit(out, "summary.txt", summary);
        std::cout << summary;
    }
    if (s.reproducer) {
        const fs::path dir = out.empty() ? fs::path(".") : fs::path(out);
        fs::create_directories(dir);
        const fs::path file = dir / ("reproducer_" + std::to_string(s.reproducer_row->index) + ".toml");
        save_machine(*s.reproducer, file);
        std::cerr << "entangled unique steady state; reproducer written to " << file.string() << "\n";
        return kExitEntangled;
    }
    return kExitOk;
}

struct OracleFlags {
    std::string cutoff{"auto"};
    double t_max{10.0};
    int steps{10};
    std::string initial{"coherent"};
    double amplitude{0.5};
    double tol{1e-6};
};

int run_oracle_compare(const ModelFlags& mf, const OracleFlags& of, const std::string& out, std::optional<double> squeeze)
{
    const MachineSpec spec = load(mf);
    const SecularDecomposition dec = decompose(spec);
    MomentDynamics dyn = build_moment_dynamics(dec);
    if (squeeze) {
        const auto [i, j] = squeeze_modes(spec);
        dyn = inject_squeezing(dyn, *squeeze * dyn.total_damping(), i, j);
    }
    const int cutoff = of.cutoff == "auto" ? auto_cutoff(dyn.data) : std::stoi(of.cutoff);
    const TruncatedGenerator gen = build_generator(dyn.data, cutoff);
    const Index d = dyn.d();

    Eigen::MatrixXcd rho0;
    GaussianState g0 = GaussianState::vacuum(d, dyn.data.basis);
    if (of.initial == "coherent") {
        const Eigen::VectorXcd alpha = Eigen::VectorXcd::Constant(d, of.amplitude);
        rho0 = fock_coherent(gen, alpha);
        const FockMoments m = fock_moments(gen, rho0);
        g0.mean = m.mean;
        g0.n = m.n;
        g0.beta = m.beta;
    } else if (of.initial == "number") {
        rho0 = fock_number_state(gen, std::vector<int>(static_cast<std::size_t>(d), static_cast<int>(of.amplitude)));
    } else if (of.initial == "thermal") {
        rho0 = fock_thermal(gen, std::vector<double>(static_cast<std::size_t>(d), of.amplitude));
    } else {
        rho0 = fock_vacuum(gen);
    }
    if (of.initial != "coherent") {
        const FockMoments m = fock_moments(gen, rho0);
        g0.mean = m.mean;
        g0.n = m.n;
        g0.beta = m.beta;
    }

    const OracleTrajectory traj = oracle_moments(gen, rho0, sample_times(of.t_max, of.steps));
    std::ostringstream os;
    os.precision(6);
    os << "t,dev_mean,dev_n,dev_beta,leak\n";
    double worst = 0.0;
    for (const auto& f : traj.samples) {
        const GaussianState g = evolve(dyn, g0, f.t);
        const double dm = (g.mean - f.mean).cwiseAbs().maxCoeff();
        const double dn = (g.n - f.n).cwiseAbs().maxCoeff();
        const double db = (g.beta - f.beta).cwiseAbs().maxCoeff();
        worst = std::max({worst, dm, dn, db});
        os << f.t << "," << dm << "," << dn << "," << db << "," << f.leak << "\n";
    }
    const SteadyResult gs = steady_state(dyn);
    const OracleSteady fs_ = oracle_steady(gen);
    std::ostringstream summary;
    summary.precision(6);
    summary << "cutoff: " << cutoff << "\n"
            << "trace_residual: " << gen.trace_residual << "\n"
            << "number_commutator_norm: " << number_commutator_norm(gen) << "\n"
            << "max_trajectory_deviation: " << worst << "\n"
            << "max_leak: " << traj.max_leak << "\n"
            << "gaussian_uniqueness: " << to_string(gs.report.status) << "\n"
            << "fock_null_dimension: " << fs_.null_dimension << "\n";
    if (gs.state && fs_.solved) {
        const double dn = (gs.state->n - fs_.moments.n).cwiseAbs().maxCoeff();
        const double db = (gs.state->beta - fs_.moments.beta).cwiseAbs().maxCoeff();
        summary << "steady_deviation_n: " << dn << "\nsteady_deviation_beta: " << db << "\n";
        worst = std::max({worst, dn, db});
    }
    for (const auto& w : traj.warnings) summary << "warning: " << w << "\n";
    for (const auto& w : fs_.warnings) summary << "warning: " << w << "\n";
    emit(out, "oracle.csv", os.str());
    if (!out.empty()) emit(out, "oracle_summary.txt", summary.str());
    std::cout << summary.str();
    if (worst > of.tol) return kExitFailure;
    return gs.report.unique() ? kExitOk : kExitNonUnique;
}

int run_check_secular(const ModelFlags& mf, const std::string& out)
{
    const MachineSpec spec = load(mf);
    emit(out, "secular.txt", format_gap_report(secular_gap(diagonalize(spec), spec)));
    return kExitOk;
}

int run_rates(const ModelFlags& mf, const std::string& out)
{
    const MachineSpec spec = load(mf);
    const SecularDecomposition dec = decompose(spec);
    std::ostringstream os;
    os.precision(17);
    os << "eigenspace,subsystem,omega,block,i,j,re,im\n";
    for (std::size_t k = 0; k < dec.eigenspaces.size(); ++k) {
        const auto& es = dec.eigenspaces[k];
        const std::string prefix = std::to_string(k + 1) + "," + std::to_string(es.subsystem + 1) + ",";
        auto dump = [&](const char* name, const Eigen::MatrixXcd& m) {
            for (Index i = 0; i < m.rows(); ++i)
                for (Index j = 0; j < m.cols(); ++j)
                    os << prefix << es.omega << "," << name << "," << es.modes[static_cast<std::size_t>(i)] + 1 << ","
                       << es.modes[static_cast<std::size_t>(j)] + 1 << "," << m(i, j).real() << "," << m(i, j).imag()
                       << "\n";
        };
        dump("gamma1", dec.gamma1[k]);
        dump("gamma2", dec.gamma2[k]);
        dump("phi", dec.phi[k]);
    }
    emit(out, "rates.csv", os.str());
    return kExitOk;
}

int run_random_machine(std::uint64_t seed, Index d, int parties, const std::string& out_file)
{
    const MachineSpec spec = random_machine(seed, d, parties);
    if (out_file.empty()) {
        std::cout << format_machine(spec);
    } else {
        save_machine(spec, out_file);
    }
    return kExitOk;
}

int run_dump_generator(const ModelFlags& mf, const std::string& out, std::optional<double> squeeze)
{
    const MachineSpec spec = load(mf);
    const SecularDecomposition dec = decompose(spec);
    MomentDynamics dyn = build_moment_dynamics(dec);
    if (squeeze) {
        const auto [i, j] = squeeze_modes(spec);
        dyn = inject_squeezing(dyn, *squeeze * dyn.total_damping(), i, j);
    }
    std::string text = "name,i,j,re,im\n";
    text += complex_matrix_csv("U", dec.U);
    text += complex_matrix_csv("h", dyn.data.h);
    text += complex_matrix_csv("gamma1", dyn.data.gamma1);
    text += complex_matrix_csv("gamma2", dyn.data.gamma2);
    text += complex_matrix_csv("pairing", dyn.data.pairing);
    text += complex_matrix_csv("R", dyn.R);
    text += complex_matrix_csv("G", dyn.G);
    text += complex_matrix_csv("F", dyn.F);
    text += complex_matrix_csv("Rbeta", dyn.Rbeta);
    emit(out, "generator.csv", text);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Steady states and separability of bosonic autonomous thermal machines"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string out;
    std::optional<double> squeeze;
    app.add_option("--out", out, "Output directory (default: stdout)");
    app.add_option("--counterfactual-squeeze", squeeze,
                   "Inject a two-mode squeezing term of this strength, in units of the total damping rate");

    ModelFlags mf;
    bool all_bip = false;
    auto* steady = app.add_subcommand("steady", "Steady state, uniqueness and separability report");
    add_model_flags(steady, mf);
    steady->add_flag("--all-bipartitions", all_bip, "Enumerate every bipartition of the parties");

    EvolveFlags ef;
    auto* evolve_cmd = app.add_subcommand("evolve", "Moment trajectories in the physical mode basis");
    add_model_flags(evolve_cmd, mf);
    evolve_cmd->add_option("--t-max", ef.t_max, "Final time");
    evolve_cmd->add_option("--steps", ef.steps, "Number of sampling intervals");
    evolve_cmd->add_option("--coherent", ef.coherent, "Initial amplitudes <a_k> (re+imj)");
    evolve_cmd->add_option("--thermal", ef.thermal, "Initial thermal occupations");

    SweepConfig cfg;
    std::string sweep_regime = "both";
    std::string sweep_lamb = "both";
    auto* sweep = app.add_subcommand("sweep", "Seeded random-machine sweep of the separability claim");
    sweep->add_option("--count", cfg.count, "Number of machines");
    sweep->add_option("--d-min", cfg.d_min);
    sweep->add_option("--d-max", cfg.d_max);
    sweep->add_option("--parties-min", cfg.parties_min);
    sweep->add_option("--parties-max", cfg.parties_max);
    sweep->add_option("--seed", cfg.seed);
    sweep->add_option("--regime", sweep_regime)->check(CLI::IsMember({"global", "local", "both"}));
    sweep->add_option("--lamb", sweep_lamb)->check(CLI::IsMember({"on", "off", "both"}));
    sweep->add_option("--workers", cfg.workers, "Worker threads (default: QTM_WORKERS or all cores)");
    sweep->add_flag("--all-bipartitions", cfg.all_bipartitions);

    OracleFlags of;
    auto* oracle = app.add_subcommand("oracle-compare", "Gaussian moments against the truncated Fock oracle");
    add_model_flags(oracle, mf);
    oracle->add_option("--cutoff", of.cutoff, "Excitations per mode, or 'auto'");
    oracle->add_option("--t-max", of.t_max);
    oracle->add_option("--steps", of.steps);
    oracle->add_option("--initial", of.initial)->check(CLI::IsMember({"vacuum", "coherent", "number", "thermal"}));
    oracle->add_option("--amplitude", of.amplitude, "Coherent amplitude, number or thermal occupation per mode");
    oracle->add_option("--tol", of.tol, "Maximum tolerated deviation");

    auto* secular = app.add_subcommand("check-secular", "Secular-approximation gap check");
    add_model_flags(secular, mf);

    auto* rates_cmd = app.add_subcommand("rates", "Rate and Lamb-shift blocks per eigenspace");
    add_model_flags(rates_cmd, mf);

    std::uint64_t seed = 1;
    Index d = 2;
    int parties = 2;
    std::string model_out;
    auto* random = app.add_subcommand("random-machine", "Write a random valid machine description");
    random->add_option("--seed", seed);
    random->add_option("--d", d, "Number of modes");
    random->add_option("--parties", parties, "Number of parties");
    random->add_option("--file", model_out, "Output file (default: stdout)");

    auto* dump = app.add_subcommand("dump-generator", "Moment-equation matrices as CSV");
    add_model_flags(dump, mf);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInvalid;
    }

    try {
        if (*steady) return run_steady(mf, out, squeeze, all_bip);
        if (*evolve_cmd) return run_evolve(mf, ef, out, squeeze);
        if (*sweep) {
            cfg.counterfactual = squeeze;
            return run_sweep_cmd(cfg, sweep_regime, sweep_lamb, out);
        }
        if (*oracle) return run_oracle_compare(mf, of, out, squeeze);
        if (*secular) return run_check_secular(mf, out);
        if (*rates_cmd) return run_rates(mf, out);
        if (*random) return run_random_machine(seed, d, parties, model_out);
        if (*dump) return run_dump_generator(mf, out, squeeze);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const ValidationError& e) {
        std::cerr << "invalid model: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const StabilityError& e) {
        std::cerr << "invalid model: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitFailure;
}
