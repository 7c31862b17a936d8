// model.cpp - Machine types, occupations and validation

#include "qtm/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qtm/linalg.hpp"

namespace qtm {

std::string to_string(Statistics s)
{
    return s == Statistics::Bosonic ? "bosonic" : "spin";
}

std::string to_string(Profile p)
{
    return p == Profile::Flat ? "flat" : "ohmic";
}

std::string to_string(Regime r)
{
    return r == Regime::Global ? "global" : "local";
}

Regime parse_regime(const std::string& text)
{
    if (text == "global") return Regime::Global;
    if (text == "local") return Regime::Local;
    throw ParseError("unknown regime '" + text + "' (expected global|local)");
}

double SpectralDensity::shape(double omega) const
{
    if (omega < 0.0) return 0.0;
    switch (profile) {
    case Profile::Flat:
        return omega <= cutoff ? 1.0 : 0.0;
    case Profile::Ohmic:
        return (omega / cutoff) * std::exp(-omega / cutoff);
    }
    return 0.0;
}

double SpectralDensity::support_end() const
{
    return profile == Profile::Flat ? cutoff : std::numeric_limits<double>::infinity();
}

SpectralDensity SpectralDensity::rank_one(Profile profile, double strength, double cutoff,
                                          const Eigen::VectorXcd& u)
{
    SpectralDensity j;
    j.profile = profile;
    j.strength = strength;
    j.cutoff = cutoff;
    j.coupling = u * u.adjoint();
    return j;
}

double MachineSpec::lamb_cutoff() const
{
    if (options.lamb_cutoff) return *options.lamb_cutoff;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(network.H, Eigen::EigenvaluesOnly);
    return 10.0 * es.eigenvalues().cwiseAbs().maxCoeff();
}

double occupation(const BathModel& bath, double omega)
{
    const double x = (omega - bath.mu) * bath.beta;
    if (bath.statistics == Statistics::Bosonic) {
        if (!(omega > bath.mu)) {
            throw DomainError("bosonic occupation requires omega > mu");
        }
        if (bath.beta == 0.0) {
            throw DomainError("bosonic occupation diverges at infinite temperature");
        }
        if (std::isinf(x)) return 0.0;
        return 1.0 / std::expm1(x);
    }
    if (std::isinf(x)) return x > 0 ? 0.0 : 1.0;
    if (std::isnan(x)) return 0.5; // beta = inf at omega == mu
    return 1.0 / (1.0 + std::exp(x));
}

namespace {

void fail(const std::string& what)
{
    throw ValidationError(what);
}

} // namespace

void validate(const MachineSpec& spec)
{
    const auto& net = spec.network;
    const auto& opt = spec.options;
    const Index d = net.d();
    if (d < 1 || net.H.cols() != d) fail("H must be a non-empty square matrix");
    if (!net.H.allFinite()) fail("H has non-finite entries");
    if (linalg::hermiticity_defect(net.H) > opt.hermiticity_tol) fail("H not Hermitian");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(linalg::hermitian_part(net.H),
                                                       Eigen::EigenvaluesOnly);
    const double min_freq = es.eigenvalues().minCoeff();
    if (!(min_freq > 0.0)) fail("H not positive definite");

    if (static_cast<Index>(net.eta.size()) != d) fail("eta must have one flag per mode");
    for (int e : net.eta) {
        if (e != 0 && e != 1) fail("eta flags must be 0 or 1");
    }

    if (net.partition.empty()) fail("partition must contain at least one subsystem");
    std::vector<int> seen(static_cast<std::size_t>(d), 0);
    for (const auto& part : net.partition) {
        if (part.empty()) fail("partition contains an empty subsystem");
        for (Index m : part) {
            if (m < 0 || m >= d) fail("partition references a mode outside 1..d");
            if (seen[static_cast<std::size_t>(m)]++) fail("partition sets overlap");
        }
    }
    if (std::find(seen.begin(), seen.end(), 0) != seen.end()) {
        fail("partition does not cover all modes");
    }

    if (spec.baths.size() != net.partition.size()) fail("bath count must equal partition count");
    for (std::size_t n = 0; n < spec.baths.size(); ++n) {
        const auto& bath = spec.baths[n];
        const std::string tag = "bath " + std::to_string(n + 1) + ": ";
        const Index size = static_cast<Index>(net.partition[n].size());
        if (std::isnan(bath.beta) || bath.beta < 0.0) fail(tag + "beta must be >= 0");
        if (bath.statistics == Statistics::Spin) {
            if (bath.mu != 0.0) fail(tag + "spin bath requires mu=0");
        } else {
            if (bath.beta == 0.0) fail(tag + "bosonic bath requires beta > 0");
            if (!(bath.mu < min_freq)) fail(tag + "mu must be below the minimum eigenfrequency");
        }
        const auto& J = bath.J;
        if (!(J.strength >= 0.0) || !std::isfinite(J.strength)) fail(tag + "spectral strength must be >= 0");
        if (!(J.cutoff > 0.0) || !std::isfinite(J.cutoff)) fail(tag + "spectral cutoff must be > 0");
        if (J.coupling.rows() != size || J.coupling.cols() != size) {
            fail(tag + "spectral coupling matrix does not match subsystem size");
        }
        if (linalg::hermiticity_defect(J.coupling) > opt.hermiticity_tol) {
            fail(tag + "spectral coupling matrix not Hermitian");
        }
        const double scale = std::max(1.0, J.coupling.cwiseAbs().maxCoeff());
        if (linalg::min_eigenvalue(J.coupling) < -opt.hermiticity_tol * scale) {
            fail(tag + "spectral coupling matrix not positive semidefinite");
        }
        if (!(bath.tau_b >= 0.0)) fail(tag + "tauB must be >= 0");
    }
    if (opt.lamb_cutoff && !(*opt.lamb_cutoff > 0.0)) fail("lamb_cutoff must be > 0");
    if (!(opt.degeneracy_tol >= 0.0)) fail("degeneracy_tol must be >= 0");
    if (!(opt.reference_frequency > 0.0)) fail("reference_frequency must be > 0");
}

} // namespace qtm
