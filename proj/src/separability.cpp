// separability.cpp - Gaussian covariance analysis

#include "qtm/separability.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "qtm/linalg.hpp"

namespace qtm {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;

namespace {

constexpr double kEntangledTol = 1e-9;

// (a_1..a_d, a_1^dag..a_d^dag) = T x; unitary.
MatrixXcd quadrature_transform(Index d)
{
    const double r = 1.0 / std::numbers::sqrt2;
    MatrixXcd t = MatrixXcd::Zero(2 * d, 2 * d);
    for (Index j = 0; j < d; ++j) {
        t(j, 2 * j) = r;
        t(j, 2 * j + 1) = cd(0.0, r);
        t(d + j, 2 * j) = r;
        t(d + j, 2 * j + 1) = cd(0.0, -r);
    }
    return t;
}

double min_hermitian_eigenvalue(const MatrixXcd& m)
{
    return linalg::min_eigenvalue(m);
}

} // namespace

CovarianceMatrix CovarianceMatrix::vacuum(Index d)
{
    return {0.5 * MatrixXd::Identity(2 * d, 2 * d), Eigen::VectorXd::Zero(2 * d)};
}

MatrixXd symplectic_form(Index d)
{
    MatrixXd o = MatrixXd::Zero(2 * d, 2 * d);
    for (Index j = 0; j < d; ++j) {
        o(2 * j, 2 * j + 1) = 1.0;
        o(2 * j + 1, 2 * j) = -1.0;
    }
    return o;
}

MatrixXcd to_complex_form(const CovarianceMatrix& cov)
{
    const MatrixXcd t = quadrature_transform(cov.modes());
    return t * cov.sigma.cast<cd>() * t.adjoint();
}

CovarianceMatrix from_complex_form(const MatrixXcd& v, const Eigen::VectorXcd& mean_a)
{
    const Index d = v.rows() / 2;
    const MatrixXcd t = quadrature_transform(d);
    CovarianceMatrix cov;
    const MatrixXd s = (t.adjoint() * v * t).real();
    cov.sigma = 0.5 * (s + s.transpose());
    cov.mean = Eigen::VectorXd::Zero(2 * d);
    for (Index j = 0; j < d && j < mean_a.size(); ++j) {
        cov.mean(2 * j) = std::numbers::sqrt2 * mean_a(j).real();
        cov.mean(2 * j + 1) = std::numbers::sqrt2 * mean_a(j).imag();
    }
    return cov;
}

CovarianceMatrix covariance_from_state(const GaussianState& physical)
{
    if (physical.basis != Basis::Physical) {
        throw std::invalid_argument("covariance_from_state: state must be in the physical basis");
    }
    return from_complex_form(physical.complex_covariance(), physical.mean);
}

double uncertainty_margin(const CovarianceMatrix& cov)
{
    const MatrixXcd m = cov.sigma.cast<cd>() + cd(0.0, 0.5) * symplectic_form(cov.modes()).cast<cd>();
    return min_hermitian_eigenvalue(m);
}

bool is_physical(const CovarianceMatrix& cov, double tol)
{
    if (cov.sigma.rows() != cov.sigma.cols() || cov.sigma.rows() % 2 != 0) return false;
    if ((cov.sigma - cov.sigma.transpose()).cwiseAbs().maxCoeff() > tol) return false;
    return uncertainty_margin(cov) >= -tol;
}

double vacuum_margin(const CovarianceMatrix& cov)
{
    const MatrixXd m = cov.sigma - 0.5 * MatrixXd::Identity(cov.sigma.rows(), cov.sigma.cols());
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

bool vacuum_dominance(const CovarianceMatrix& cov, double tol)
{
    return vacuum_margin(cov) >= -tol;
}

Eigen::VectorXd symplectic_eigenvalues(const MatrixXd& sigma)
{
    const Index d = sigma.rows() / 2;
    const MatrixXcd m = cd(0.0, 1.0) * (symplectic_form(d) * sigma).cast<cd>();
    const Eigen::VectorXcd ev = Eigen::ComplexEigenSolver<MatrixXcd>(m, false).eigenvalues();
    std::vector<double> mags;
    for (Index k = 0; k < ev.size(); ++k) mags.push_back(std::abs(ev(k)));
    std::sort(mags.begin(), mags.end());
    Eigen::VectorXd out(d);
    // Eigenvalues come in +-nu pairs; keep one of each pair.
    for (Index k = 0; k < d; ++k) out(k) = 0.5 * (mags[static_cast<std::size_t>(2 * k)] + mags[static_cast<std::size_t>(2 * k + 1)]);
    return out;
}

double log_negativity(const CovarianceMatrix& cov, const std::vector<Index>& side_b, double tol)
{
    if (!is_physical(cov, tol)) throw DomainError("log_negativity: covariance matrix is not physical");
    MatrixXd pt = cov.sigma;
    for (Index m : side_b) {
        if (m < 0 || m >= cov.modes()) throw std::invalid_argument("log_negativity: mode out of range");
        pt.row(2 * m + 1) *= -1.0;
        pt.col(2 * m + 1) *= -1.0;
    }
    double en = 0.0;
    for (double nu : symplectic_eigenvalues(pt)) en += std::max(0.0, -std::log2(2.0 * nu));
    return en;
}

std::string to_string(Verdict v)
{
    switch (v) {
    case Verdict::Separable: return "separable";
    case Verdict::Entangled: return "entangled";
    case Verdict::Undetermined: return "undetermined";
    }
    return "?";
}

std::string Bipartition::label() const
{
    auto list = [](const std::vector<Index>& modes) {
        std::string s;
        for (std::size_t k = 0; k < modes.size(); ++k) s += (k ? " " : "") + std::to_string(modes[k] + 1);
        return s;
    };
    return "{" + list(modes_a) + "}|{" + list(modes_b) + "}";
}

std::vector<Bipartition> bipartitions(const std::vector<std::vector<Index>>& parties, bool all)
{
    const int n = static_cast<int>(parties.size());
    std::vector<Bipartition> out;
    if (n < 2) return out;
    std::set<std::vector<bool>> seen;
    auto add = [&](std::vector<bool> side_a) {
        // Canonical orientation: party 0 on side A.
        if (!side_a[0]) side_a.flip();
        if (!seen.insert(side_a).second) return;
        Bipartition b;
        for (int p = 0; p < n; ++p) {
            auto& dst = side_a[static_cast<std::size_t>(p)] ? b.modes_a : b.modes_b;
            if (side_a[static_cast<std::size_t>(p)]) b.parties_a.push_back(p);
            dst.insert(dst.end(), parties[static_cast<std::size_t>(p)].begin(), parties[static_cast<std::size_t>(p)].end());
        }
        std::sort(b.modes_a.begin(), b.modes_a.end());
        std::sort(b.modes_b.begin(), b.modes_b.end());
        out.push_back(std::move(b));
    };
    if (all) {
        if (n > 24) throw ValidationError("too many parties for full bipartition enumeration");
        for (unsigned long mask = 0; mask + 1 < (1ul << (n - 1)); ++mask) {
            std::vector<bool> a(static_cast<std::size_t>(n), false);
            a[0] = true;
            for (int p = 1; p < n; ++p) a[static_cast<std::size_t>(p)] = (mask >> (p - 1)) & 1ul;
            add(a);
        }
        return out;
    }
    for (int p = 0; p < n; ++p) {
        std::vector<bool> a(static_cast<std::size_t>(n), false);
        a[static_cast<std::size_t>(p)] = true;
        add(a);
    }
    for (int k = 1; k < n; ++k) {
        std::vector<bool> a(static_cast<std::size_t>(n), false);
        for (int p = 0; p < k; ++p) a[static_cast<std::size_t>(p)] = true;
        add(a);
    }
    return out;
}

bool SeparabilityReport::any_entangled() const
{
    return std::any_of(entries.begin(), entries.end(), [](const Entry& e) { return e.verdict == Verdict::Entangled; });
}

SeparabilityReport analyze_separability(const CovarianceMatrix& cov, std::vector<std::vector<Index>> parties,
                                        bool all_bipartitions, double tol)
{
    SeparabilityReport r;
    const Index d = cov.modes();
    r.uncertainty_margin = uncertainty_margin(cov);
    r.physical = is_physical(cov, tol);
    r.vacuum_margin = vacuum_margin(cov);
    r.vacuum_dominant = r.vacuum_margin >= -tol;
    const MatrixXcd v = to_complex_form(cov);
    r.squeezing_block = v.topRightCorner(d, d).cwiseAbs().maxCoeff();
    r.unsqueezed = r.squeezing_block <= tol;
    if (!r.physical) return r;

    if (parties.size() == 1) {
        const auto modes = parties.front();
        parties.clear();
        for (Index m : modes) parties.push_back({m});
    }
    for (auto& split : bipartitions(parties, all_bipartitions)) {
        SeparabilityReport::Entry e;
        e.log_negativity = log_negativity(cov, split.modes_b, tol);
        if (r.vacuum_dominant) {
            e.verdict = Verdict::Separable;
        } else if (e.log_negativity > kEntangledTol) {
            e.verdict = Verdict::Entangled;
        } else if (split.modes_a.size() == 1 || split.modes_b.size() == 1) {
            e.verdict = Verdict::Separable;
        } else {
            e.verdict = Verdict::Undetermined;
        }
        e.split = std::move(split);
        r.entries.push_back(std::move(e));
    }
    return r;
}

std::string format_report(const SeparabilityReport& r)
{
    std::ostringstream os;
    os.precision(10);
    auto flag = [](bool b) { return b ? "true" : "false"; };
    os << "physical: " << flag(r.physical) << " (margin " << r.uncertainty_margin << ")\n"
       << "unsqueezed: " << flag(r.unsqueezed) << " (max off-diagonal " << r.squeezing_block << ")\n"
       << "vacuum_dominant: " << flag(r.vacuum_dominant) << " (margin " << r.vacuum_margin << ")\n";
    for (const auto& e : r.entries) {
        os << "bipartition " << e.split.label() << ": log_negativity = " << e.log_negativity
           << ", verdict = " << to_string(e.verdict) << "\n";
    }
    return os.str();
}

std::string format_csv(const SeparabilityReport& r)
{
    std::ostringstream os;
    os.precision(12);
    os << "bipartition,log_negativity,verdict\n";
    for (const auto& e : r.entries)
        os << "\"" << e.split.label() << "\"," << e.log_negativity << "," << to_string(e.verdict) << "\n";
    return os.str();
}

} // namespace qtm
