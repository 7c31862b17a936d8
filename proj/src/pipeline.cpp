// pipeline.cpp - End-to-end steady-state analysis

#include "qtm/pipeline.hpp"

#include <algorithm>
#include <sstream>

namespace qtm {

double PipelineResult::max_log_negativity() const
{
    double m = 0.0;
    if (separability)
        for (const auto& e : separability->entries) m = std::max(m, e.log_negativity);
    return m;
}

std::pair<Index, Index> squeeze_modes(const MachineSpec& spec)
{
    const auto& p = spec.network.partition;
    if (p.size() >= 2) return {p[0].front(), p[1].front()};
    if (spec.d() >= 2) return {p[0][0], p[0][1]};
    return {0, 0};
}

PipelineResult run_pipeline(const MachineSpec& spec, const PipelineOptions& opts)
{
    PipelineResult r;
    r.dec = decompose(spec);
    r.gap = secular_gap(r.dec, spec);
    r.dyn = build_moment_dynamics(r.dec);
    r.rh = check_RH_negative(r.dyn);
    if (opts.counterfactual_squeeze) {
        r.squeeze_strength = *opts.counterfactual_squeeze * r.dyn.total_damping();
        const auto [i, j] = squeeze_modes(spec);
        r.dyn = inject_squeezing(r.dyn, r.squeeze_strength, i, j);
    }
    r.steady = steady_state(r.dyn);
    if (r.steady.state) {
        r.physical = to_physical(*r.steady.state, r.dec.U);
        r.cov = covariance_from_state(*r.physical);
        r.separability = analyze_separability(*r.cov, spec.network.partition, opts.all_bipartitions);
    }
    return r;
}

int exit_code(const PipelineResult& r)
{
    if (!r.steady.report.unique()) return kExitNonUnique;
    if (r.separability && (r.separability->any_entangled() || !r.separability->physical)) return kExitEntangled;
    return kExitOk;
}

std::string format_steady_report(const PipelineResult& r)
{
    std::ostringstream os;
    os.precision(10);
    os << "[secular]\n" << format_gap_report(r.gap);
    os << "[dissipative_drift]\nmax_eigenvalue_hermitian_part: " << r.rh.max_eigenvalue
       << (r.rh.pass ? " (negative semidefinite)" : " (VIOLATED)") << "\n";
    if (r.dyn.counterfactual) os << "counterfactual_squeeze_strength: " << r.squeeze_strength << "\n";
    os << "[uniqueness]\n" << format_report(r.steady.report);
    if (r.physical) {
        os << "[steady_state]\noccupation_diagonal:";
        for (Index k = 0; k < r.physical->d(); ++k) os << " " << r.physical->n(k, k).real();
        os << "\nmax_abs_beta: " << (r.physical->beta.size() ? r.physical->beta.cwiseAbs().maxCoeff() : 0.0) << "\n";
    }
    if (r.separability) os << "[separability]\n" << format_report(*r.separability);
    return os.str();
}

std::string matrix_csv(const Eigen::MatrixXd& m)
{
    std::ostringstream os;
    os.precision(17);
    os << "i,j,value\n";
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j) os << i + 1 << "," << j + 1 << "," << m(i, j) << "\n";
    return os.str();
}

} // namespace qtm
