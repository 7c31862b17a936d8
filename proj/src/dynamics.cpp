// dynamics.cpp - Moment equations, exact propagation and steady states

#include "qtm/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qtm/linalg.hpp"

namespace qtm {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

namespace {

constexpr double kSingularTol = 1e-10;

double max_real(const Eigen::VectorXcd& ev)
{
    double m = -std::numeric_limits<double>::infinity();
    for (Index i = 0; i < ev.size(); ++i) m = std::max(m, ev(i).real());
    return m;
}

// Van Loan block for one short step tau: returns exp(A tau) and
// Q(tau) = int_0^tau exp(A s) D exp(A^dag s) ds.
std::pair<MatrixXcd, MatrixXcd> van_loan(const MatrixXcd& a, const MatrixXcd& d, double tau)
{
    const Index n = a.rows();
    MatrixXcd m = MatrixXcd::Zero(2 * n, 2 * n);
    m.topLeftCorner(n, n) = -a * tau;
    m.topRightCorner(n, n) = d * tau;
    m.bottomRightCorner(n, n) = a.adjoint() * tau;
    const MatrixXcd e = linalg::expm(m);
    const MatrixXcd phi = e.bottomRightCorner(n, n).adjoint();
    MatrixXcd q = phi * e.topRightCorner(n, n);
    return {phi, linalg::hermitian_part(q)};
}

} // namespace

std::string to_string(Basis b)
{
    switch (b) {
    case Basis::BogoliubovGlobal: return "bogoliubov-global";
    case Basis::BogoliubovLocal: return "bogoliubov-local";
    case Basis::Physical: return "physical";
    }
    return "?";
}

GeneratorData generator_data(const SecularDecomposition& dec)
{
    if (!dec.has_rates()) throw std::logic_error("generator_data: decomposition has no rate blocks");
    GeneratorData g;
    g.basis = dec.regime == Regime::Global ? Basis::BogoliubovGlobal : Basis::BogoliubovLocal;
    g.U = dec.U;
    g.h = dec.h_system;
    if (dec.phi.size() == dec.eigenspaces.size()) g.h += dec.embed(dec.phi);
    g.h = linalg::hermitian_part(g.h);
    g.gamma1 = dec.embed(dec.gamma1);
    g.gamma2 = dec.embed(dec.gamma2);
    g.pairing = MatrixXcd::Zero(dec.d(), dec.d());
    return g;
}

MomentDynamics build_moment_dynamics(GeneratorData data)
{
    const Index d = data.d();
    if (data.pairing.size() == 0) data.pairing = MatrixXcd::Zero(d, d);
    MomentDynamics m;
    const cd i(0.0, 1.0);
    m.R = -i * data.h + 0.5 * (data.gamma1 - data.gamma2.transpose());
    m.G = m.R.conjugate();
    m.F = data.gamma1.conjugate();
    m.Rbeta = m.R;
    m.counterfactual = data.pairing.cwiseAbs().maxCoeff() > 0.0;
    m.data = std::move(data);
    return m;
}

MomentDynamics build_moment_dynamics(const SecularDecomposition& dec)
{
    return build_moment_dynamics(generator_data(dec));
}

MatrixXcd MomentDynamics::drift() const
{
    const Index n = d();
    const cd i(0.0, 1.0);
    MatrixXcd a(2 * n, 2 * n);
    a.topLeftCorner(n, n) = R;
    a.topRightCorner(n, n) = -i * data.pairing;
    a.bottomLeftCorner(n, n) = i * data.pairing.conjugate();
    a.bottomRightCorner(n, n) = R.conjugate();
    return a;
}

MatrixXcd MomentDynamics::diffusion() const
{
    const Index n = d();
    MatrixXcd dm = MatrixXcd::Zero(2 * n, 2 * n);
    dm.topLeftCorner(n, n) = 0.5 * (data.gamma1 + data.gamma2.conjugate());
    dm.bottomRightCorner(n, n) = 0.5 * (data.gamma1.conjugate() + data.gamma2);
    return dm;
}

MatrixXcd MomentDynamics::dissipative_drift() const
{
    return 0.5 * (data.gamma1 - data.gamma2.transpose());
}

double MomentDynamics::total_damping() const
{
    return (data.gamma2.diagonal() - data.gamma1.diagonal()).real().sum();
}

GaussianState GaussianState::vacuum(Index d, Basis basis)
{
    GaussianState s;
    s.mean = VectorXcd::Zero(d);
    s.n = MatrixXcd::Zero(d, d);
    s.beta = MatrixXcd::Zero(d, d);
    s.basis = basis;
    return s;
}

MatrixXcd GaussianState::centered_n() const
{
    return n - mean.conjugate() * mean.transpose();
}

MatrixXcd GaussianState::complex_covariance() const
{
    const Index k = d();
    const MatrixXcd nc = centered_n();
    const MatrixXcd half = 0.5 * MatrixXcd::Identity(k, k);
    MatrixXcd v(2 * k, 2 * k);
    v.topLeftCorner(k, k) = nc.transpose() + half;
    v.topRightCorner(k, k) = beta;
    v.bottomLeftCorner(k, k) = beta.conjugate();
    v.bottomRightCorner(k, k) = nc + half;
    return v;
}

GaussianState GaussianState::from_complex_covariance(const VectorXcd& mean, const MatrixXcd& v, Basis basis)
{
    const Index k = mean.size();
    GaussianState s;
    s.basis = basis;
    s.mean = mean;
    // Average the two redundant copies of n_c.
    const MatrixXcd nc = 0.5 * (v.bottomRightCorner(k, k) + v.topLeftCorner(k, k).transpose()) -
                         0.5 * MatrixXcd::Identity(k, k);
    s.n = linalg::hermitian_part(nc) + mean.conjugate() * mean.transpose();
    const MatrixXcd b = 0.5 * (v.topRightCorner(k, k) + v.bottomLeftCorner(k, k).conjugate());
    s.beta = 0.5 * (b + b.transpose());
    return s;
}

GaussianState to_physical(const GaussianState& s, const MatrixXcd& U)
{
    if (s.basis == Basis::Physical) return s;
    GaussianState out;
    out.basis = Basis::Physical;
    out.mean = U * s.mean;
    out.n = U.conjugate() * s.n * U.transpose();
    out.beta = U * s.beta * U.transpose();
    return out;
}

GaussianState from_physical(const GaussianState& s, const MatrixXcd& U, Basis basis)
{
    if (s.basis != Basis::Physical) return s;
    GaussianState out;
    out.basis = basis;
    out.mean = U.adjoint() * s.mean;
    out.n = U.transpose() * s.n * U.conjugate();
    out.beta = U.adjoint() * s.beta * U.conjugate();
    return out;
}

GaussianState evolve(const MomentDynamics& dyn, const GaussianState& state, double t)
{
    if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("evolution time must be finite and >= 0");
    if (state.d() != dyn.d()) throw std::invalid_argument("evolve: state dimension mismatch");
    if (t == 0.0) return state;
    const MatrixXcd a = dyn.drift();
    const MatrixXcd dm = dyn.diffusion();

    // Propagate over t / 2^k with ||A|| t / 2^k <= 1/2, then double:
    // Q(2s) = Q(s) + Phi(s) Q(s) Phi(s)^dag, Phi(2s) = Phi(s)^2.
    const double norm = std::max(a.cwiseAbs().colwise().sum().maxCoeff(), dm.cwiseAbs().colwise().sum().maxCoeff());
    int k = 0;
    while (norm * t / std::ldexp(1.0, k) > 0.5 && k < 80) ++k;
    auto [phi, q] = van_loan(a, dm, std::ldexp(t, -k));
    for (int s = 0; s < k; ++s) {
        q = linalg::hermitian_part(q + phi * q * phi.adjoint());
        phi = phi * phi;
    }
    if (!phi.allFinite() || !q.allFinite()) throw IntegratorError("matrix exponential overflow");

    const Index n = dyn.d();
    VectorXcd x(2 * n);
    x << state.mean, state.mean.conjugate();
    const VectorXcd xt = phi * x;
    const MatrixXcd v = phi * state.complex_covariance() * phi.adjoint() + q;
    return GaussianState::from_complex_covariance(xt.head(n), v, state.basis);
}

std::string to_string(UniquenessReport::Status s)
{
    switch (s) {
    case UniquenessReport::Status::Unique: return "unique";
    case UniquenessReport::Status::NonUnique: return "non-unique";
    case UniquenessReport::Status::NonRelaxing: return "non-relaxing";
    case UniquenessReport::Status::Unstable: return "unstable";
    }
    return "?";
}

std::string format_report(const UniquenessReport& r)
{
    std::ostringstream os;
    os.precision(6);
    os << "status: " << to_string(r.status) << "\n"
       << "R_invertible: " << (r.r_invertible ? "true" : "false") << "\n"
       << "R_condition: " << r.r_condition << "\n"
       << "rotating_singular: " << (r.rotating_singular ? "true" : "false") << "\n"
       << "non_decaying_modes: " << r.non_decaying_modes << "\n"
       << "max_real_R: " << r.max_real_R << "\n"
       << "max_real_drift: " << r.max_real_drift << "\n"
       << "max_real_second_moment: " << r.max_real_second_moment << "\n"
       << "hurwitz: " << (r.hurwitz ? "true" : "false") << "\n";
    if (!r.message.empty()) os << "message: " << r.message << "\n";
    return os.str();
}

namespace {

UniquenessReport certify(const MomentDynamics& dyn)
{
    UniquenessReport r;
    const Index n = dyn.d();
    const Eigen::VectorXd sv = linalg::singular_values(dyn.R);
    const double smax = sv.size() ? sv(0) : 0.0;
    const double smin = sv.size() ? sv(sv.size() - 1) : 0.0;
    r.r_invertible = smax > 0.0 && smin / smax >= kSingularTol;
    r.r_condition = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();

    const Eigen::VectorXcd ev_r = Eigen::ComplexEigenSolver<MatrixXcd>(dyn.R, false).eigenvalues();
    r.max_real_R = max_real(ev_r);
    for (Index k = 0; k < ev_r.size() && smax > 0.0; ++k) {
        MatrixXcd shifted = dyn.R - cd(0.0, ev_r(k).imag()) * MatrixXcd::Identity(n, n);
        const Eigen::VectorXd s = linalg::singular_values(shifted);
        if (s(s.size() - 1) / smax < kSingularTol) r.rotating_singular = true;
    }

    const MatrixXcd a = dyn.drift();
    const Eigen::VectorXcd ev_a = Eigen::ComplexEigenSolver<MatrixXcd>(a, false).eigenvalues();
    r.max_real_drift = max_real(ev_a);
    // Eigenvalues of V -> A V + V A^dag are lambda_i + conj(lambda_j).
    r.max_real_second_moment = 2.0 * r.max_real_drift;
    const double tol = kSingularTol * std::max(linalg::singular_values(a)(0), 1e-300);
    // Each mode appears twice in the (b, b^dag) drift.
    int slow = 0;
    for (Index k = 0; k < ev_a.size(); ++k)
        if (ev_a(k).real() >= -tol) ++slow;
    r.non_decaying_modes = slow / 2;
    r.hurwitz = r.max_real_drift < -tol;

    using S = UniquenessReport::Status;
    if (r.max_real_drift > tol) {
        r.status = S::Unstable;
        r.message = "drift has an eigenvalue with positive real part; moments grow without bound";
    } else if (!r.r_invertible) {
        r.status = S::NonUnique;
        r.message = "R is singular";
    } else if (slow == ev_a.size()) {
        r.status = S::NonRelaxing;
        r.message = "no mode is damped (no dissipation reaches the network)";
    } else if (slow > 0 || r.rotating_singular) {
        r.status = S::NonUnique;
        r.message = "a mode decouples from every bath (R - i w singular at a normal-mode frequency); "
                    "the stationary state depends on the initial state";
    } else {
        r.status = S::Unique;
    }
    return r;
}

} // namespace

SteadyResult steady_state(const MomentDynamics& dyn)
{
    SteadyResult out;
    out.report = certify(dyn);
    if (!out.report.unique()) return out;
    const Index n = dyn.d();
    const Basis basis = dyn.data.basis;
    if (!dyn.counterfactual) {
        GaussianState s = GaussianState::vacuum(n, basis);
        s.n = linalg::hermitian_part(linalg::solve_lyapunov(dyn.G, dyn.F));
        out.state = std::move(s);
    } else {
        const MatrixXcd v = linalg::solve_lyapunov(dyn.drift(), dyn.diffusion());
        out.state = GaussianState::from_complex_covariance(VectorXcd::Zero(n), linalg::hermitian_part(v), basis);
    }
    return out;
}

RhDiagnostic check_RH_negative(const MomentDynamics& dyn, double tol)
{
    RhDiagnostic r;
    r.max_eigenvalue = linalg::max_eigenvalue(linalg::hermitian_part(dyn.dissipative_drift()));
    r.pass = r.max_eigenvalue <= tol;
    return r;
}

MomentDynamics inject_squeezing(const MomentDynamics& dyn, double strength, Index mode_i, Index mode_j)
{
    const Index n = dyn.d();
    if (mode_i < 0 || mode_j < 0 || mode_i >= n || mode_j >= n) {
        throw ValidationError("squeezing mode index out of range");
    }
    MatrixXcd ka = MatrixXcd::Zero(n, n);
    ka(mode_i, mode_j) = cd(0.0, strength);
    ka(mode_j, mode_i) = cd(0.0, strength);
    const MatrixXcd& U = dyn.data.U;
    GeneratorData data = dyn.data;
    data.pairing += U.adjoint() * ka * U.conjugate();
    return build_moment_dynamics(std::move(data));
}

} // namespace qtm
