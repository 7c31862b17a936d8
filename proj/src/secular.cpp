// secular.cpp - Bogoliubov transforms and secular generator blocks

#include "qtm/secular.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "qtm/linalg.hpp"
#include "qtm/spectra.hpp"

namespace qtm {

namespace {

struct LocalEig {
    Eigen::VectorXd values;
    Eigen::MatrixXcd vectors;
};

LocalEig hermitian_eig(const Eigen::MatrixXcd& h)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(linalg::hermitian_part(h));
    return {es.eigenvalues(), es.eigenvectors()};
}

// Rows of U belonging to subsystem n, restricted to the columns of one eigenspace.
Eigen::MatrixXcd coefficient_block(const SecularDecomposition& dec, const std::vector<Index>& rows,
                                   const std::vector<Index>& cols)
{
    Eigen::MatrixXcd out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j)
            out(static_cast<Index>(i), static_cast<Index>(j)) = dec.U(rows[i], cols[j]);
    return out;
}

std::vector<std::size_t> contributing_baths(const Eigenspace& es, const MachineSpec& spec)
{
    if (es.subsystem >= 0) return {static_cast<std::size_t>(es.subsystem)};
    std::vector<std::size_t> all(spec.baths.size());
    std::iota(all.begin(), all.end(), 0);
    return all;
}

void add_eigenspaces(SecularDecomposition& dec, const std::vector<Index>& modes, int subsystem,
                     double tol)
{
    std::vector<double> freqs;
    for (Index m : modes) freqs.push_back(dec.omegas(m));
    bool chain = false;
    for (const auto& group : group_frequencies(freqs, tol, &chain)) {
        Eigenspace es;
        es.subsystem = subsystem;
        double sum = 0.0;
        for (Index k : group) {
            es.modes.push_back(modes[static_cast<std::size_t>(k)]);
            sum += freqs[static_cast<std::size_t>(k)];
        }
        es.omega = sum / static_cast<double>(group.size());
        dec.eigenspaces.push_back(std::move(es));
    }
    if (chain) {
        dec.warnings.push_back("near-degeneracy chain grouped transitively" +
                               (subsystem >= 0 ? " in subsystem " + std::to_string(subsystem + 1) : std::string()));
    }
}

} // namespace

Eigen::MatrixXcd SecularDecomposition::embed(const std::vector<Eigen::MatrixXcd>& blocks) const
{
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d(), d());
    for (std::size_t k = 0; k < blocks.size() && k < eigenspaces.size(); ++k) {
        const auto& modes = eigenspaces[k].modes;
        for (std::size_t i = 0; i < modes.size(); ++i)
            for (std::size_t j = 0; j < modes.size(); ++j)
                out(modes[i], modes[j]) = blocks[k](static_cast<Index>(i), static_cast<Index>(j));
    }
    return out;
}

std::vector<std::vector<Index>> group_frequencies(std::span<const double> sorted, double tol,
                                                  bool* chain_warning)
{
    std::vector<std::vector<Index>> groups;
    if (chain_warning) *chain_warning = false;
    for (std::size_t k = 0; k < sorted.size(); ++k) {
        if (!groups.empty() && sorted[k] - sorted[k - 1] <= tol) {
            groups.back().push_back(static_cast<Index>(k));
            const double span = sorted[k] - sorted[static_cast<std::size_t>(groups.back().front())];
            if (span > tol && chain_warning) *chain_warning = true;
        } else {
            groups.push_back({static_cast<Index>(k)});
        }
    }
    return groups;
}

double min_bohr_gap(std::span<const double> freqs, double tol)
{
    std::vector<double> nu;
    for (double a : freqs)
        for (double b : freqs) nu.push_back(a - b);
    std::sort(nu.begin(), nu.end());
    std::vector<double> distinct;
    for (double v : nu) {
        if (distinct.empty() || v - distinct.back() > tol) distinct.push_back(v);
    }
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < distinct.size(); ++k) gap = std::min(gap, distinct[k] - distinct[k - 1]);
    return gap;
}

SecularDecomposition diagonalize(const MachineSpec& spec, std::mt19937_64* gauge_rng)
{
    const auto& H = spec.network.H;
    const Index d = spec.d();
    SecularDecomposition dec;
    dec.regime = spec.options.regime;
    dec.U = Eigen::MatrixXcd::Zero(d, d);
    dec.omegas = Eigen::VectorXd::Zero(d);
    dec.mode_subsystem.assign(static_cast<std::size_t>(d), -1);

    const LocalEig full = hermitian_eig(H);
    const double scale = full.values.cwiseAbs().maxCoeff();
    const double tol = spec.options.degeneracy_tol * scale;
    if (!(full.values.minCoeff() > 0.0)) throw StabilityError("H not positive definite");

    if (dec.regime == Regime::Global) {
        dec.U = full.vectors;
        dec.omegas = full.values;
        std::vector<Index> modes(static_cast<std::size_t>(d));
        std::iota(modes.begin(), modes.end(), 0);
        add_eigenspaces(dec, modes, -1, tol);
    } else {
        Index col = 0;
        for (std::size_t n = 0; n < spec.network.partition.size(); ++n) {
            const auto& part = spec.network.partition[n];
            const Index m = static_cast<Index>(part.size());
            Eigen::MatrixXcd block(m, m);
            for (Index i = 0; i < m; ++i)
                for (Index j = 0; j < m; ++j) block(i, j) = H(part[i], part[j]);
            const LocalEig local = hermitian_eig(block);
            if (!(local.values.minCoeff() > 0.0)) {
                throw StabilityError("local Hamiltonian of subsystem " + std::to_string(n + 1) +
                                     " not positive definite");
            }
            std::vector<Index> modes;
            for (Index j = 0; j < m; ++j) {
                for (Index i = 0; i < m; ++i) dec.U(part[i], col) = local.vectors(i, j);
                dec.omegas(col) = local.values(j);
                dec.mode_subsystem[static_cast<std::size_t>(col)] = static_cast<int>(n);
                modes.push_back(col);
                ++col;
            }
            add_eigenspaces(dec, modes, static_cast<int>(n), tol);
        }
    }

    if (gauge_rng) {
        for (const auto& es : dec.eigenspaces) {
            if (es.modes.size() < 2) continue;
            const Index k = static_cast<Index>(es.modes.size());
            const Eigen::MatrixXcd w = linalg::random_unitary(k, *gauge_rng);
            Eigen::MatrixXcd cols(d, k);
            for (Index j = 0; j < k; ++j) cols.col(j) = dec.U.col(es.modes[static_cast<std::size_t>(j)]);
            cols = cols * w;
            for (Index j = 0; j < k; ++j) dec.U.col(es.modes[static_cast<std::size_t>(j)]) = cols.col(j);
        }
    }

    dec.h_system = linalg::hermitian_part(dec.U.adjoint() * H * dec.U);
    dec.hC = Eigen::MatrixXcd::Zero(d, d);
    if (dec.regime == Regime::Local) {
        for (Index i = 0; i < d; ++i)
            for (Index j = 0; j < d; ++j)
                if (dec.mode_subsystem[static_cast<std::size_t>(i)] != dec.mode_subsystem[static_cast<std::size_t>(j)])
                    dec.hC(i, j) = dec.h_system(i, j);
    }
    return dec;
}

SecularDecomposition assemble_rates(SecularDecomposition dec, const MachineSpec& spec)
{
    dec.gamma1.clear();
    dec.gamma2.clear();
    for (const auto& es : dec.eigenspaces) {
        const Index k = static_cast<Index>(es.modes.size());
        Eigen::MatrixXcd g1 = Eigen::MatrixXcd::Zero(k, k);
        Eigen::MatrixXcd g2 = Eigen::MatrixXcd::Zero(k, k);
        for (std::size_t n : contributing_baths(es, spec)) {
            const RateSample r = rates(spec.baths[n], es.omega);
            const Eigen::MatrixXcd C = coefficient_block(dec, spec.network.partition[n], es.modes);
            g1 += C.adjoint() * r.gamma1 * C;
            g2 += C.transpose() * r.gamma2 * C.conjugate();
        }
        g1 = linalg::hermitian_part(g1);
        g2 = linalg::hermitian_part(g2);
        const double scale = std::max({1e-300, g1.cwiseAbs().maxCoeff(), g2.cwiseAbs().maxCoeff()});
        if (linalg::min_eigenvalue(g1) < -spec.options.psd_tol * scale ||
            linalg::min_eigenvalue(g2) < -spec.options.psd_tol * scale) {
            throw ValidationError("rate block not positive semidefinite (inconsistent spectral density)");
        }
        dec.gamma1.push_back(std::move(g1));
        dec.gamma2.push_back(std::move(g2));
    }
    return dec;
}

SecularDecomposition assemble_lamb(SecularDecomposition dec, const MachineSpec& spec)
{
    dec.phi.clear();
    dec.lamb_error = 0.0;
    const double cutoff = spec.lamb_cutoff();
    for (const auto& es : dec.eigenspaces) {
        const Index k = static_cast<Index>(es.modes.size());
        Eigen::MatrixXcd phi = Eigen::MatrixXcd::Zero(k, k);
        if (spec.options.lamb) {
            for (std::size_t n : contributing_baths(es, spec)) {
                const auto& bath = spec.baths[n];
                const auto& part = spec.network.partition[n];
                const Index m = static_cast<Index>(part.size());
                Eigen::MatrixXcd eta = Eigen::MatrixXcd::Zero(m, m);
                for (Index i = 0; i < m; ++i) eta(i, i) = spec.network.eta[static_cast<std::size_t>(part[i])];
                double err_pos = 0.0;
                double err_neg = 0.0;
                const Eigen::MatrixXcd k_pos = lamb_kernel(bath, es.omega, cutoff, &err_pos);
                Eigen::MatrixXcd x = k_pos;
                if (eta.cwiseAbs().maxCoeff() > 0.0) {
                    const Eigen::MatrixXcd k_neg = lamb_kernel(bath, -es.omega, cutoff, &err_neg);
                    x += eta * k_neg.transpose() * eta;
                }
                dec.lamb_error += err_pos + err_neg;
                const Eigen::MatrixXcd C = coefficient_block(dec, part, es.modes);
                phi += C.adjoint() * x * C;
            }
            phi = linalg::hermitian_part(phi);
        }
        dec.phi.push_back(std::move(phi));
    }
    return dec;
}

SecularDecomposition decompose(const MachineSpec& spec, std::mt19937_64* gauge_rng)
{
    return assemble_lamb(assemble_rates(diagonalize(spec, gauge_rng), spec), spec);
}

SecularGapReport secular_gap(const SecularDecomposition& dec, const MachineSpec& spec)
{
    SecularGapReport rep;
    rep.warnings = dec.warnings;
    for (const auto& b : spec.baths) rep.tau_b = std::max(rep.tau_b, b.tau_b);
    rep.inverse_tau_b = rep.tau_b > 0.0 ? 1.0 / rep.tau_b : std::numeric_limits<double>::infinity();
    if (rep.tau_b <= 0.0) rep.warnings.push_back("no bath correlation time (tauB) given");

    const double scale = dec.omegas.cwiseAbs().maxCoeff();
    const double tol = spec.options.degeneracy_tol * scale;
    std::vector<int> owners;
    for (const auto& es : dec.eigenspaces) {
        if (std::find(owners.begin(), owners.end(), es.subsystem) == owners.end()) owners.push_back(es.subsystem);
    }
    rep.min_gap = std::numeric_limits<double>::infinity();
    for (int owner : owners) {
        SecularGapReport::Entry e;
        e.subsystem = owner;
        for (const auto& es : dec.eigenspaces)
            if (es.subsystem == owner) e.frequencies.push_back(es.omega);
        e.min_gap = min_bohr_gap(e.frequencies, tol);
        rep.min_gap = std::min(rep.min_gap, e.min_gap);
        rep.entries.push_back(std::move(e));
    }
    rep.pass = rep.min_gap > rep.inverse_tau_b;
    return rep;
}

std::string format_gap_report(const SecularGapReport& r)
{
    std::ostringstream os;
    os.precision(12);
    os << "status: " << (r.pass ? "PASS" : "WARN") << "\n";
    os << "min_bohr_gap: " << r.min_gap << "\n";
    os << "tau_b: " << r.tau_b << "\n";
    os << "inverse_tau_b: " << r.inverse_tau_b << "\n";
    for (const auto& e : r.entries) {
        os << (e.subsystem < 0 ? std::string("global") : "subsystem " + std::to_string(e.subsystem + 1))
           << ": frequencies =";
        for (double w : e.frequencies) os << " " << w;
        os << "; min_gap = " << e.min_gap << "\n";
    }
    for (const auto& w : r.warnings) os << "warning: " << w << "\n";
    return os.str();
}

} // namespace qtm
