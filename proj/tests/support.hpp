// support.hpp - Machine fixtures and independent reference computations for the tests

#pragma once

#include <cmath>
#include <functional>
#include <random>

#include "qtm/model.hpp"

namespace qtm::testing {

inline BathModel make_bath(Statistics s, double beta, double mu, double kappa, Index size = 1,
                           Profile profile = Profile::Flat, double cutoff = 5.0)
{
    BathModel b;
    b.statistics = s;
    b.beta = beta;
    b.mu = s == Statistics::Spin ? 0.0 : mu;
    b.J.profile = profile;
    b.J.strength = kappa;
    b.J.cutoff = cutoff;
    b.J.coupling = Eigen::MatrixXcd::Identity(size, size);
    b.tau_b = 0.1;
    return b;
}

inline MachineSpec single_mode(double omega, const BathModel& bath, bool lamb = false)
{
    MachineSpec m;
    m.network.H = Eigen::MatrixXcd::Constant(1, 1, omega);
    m.network.partition = {{0}};
    m.network.eta = {0};
    m.baths = {bath};
    m.options.lamb = lamb;
    return m;
}

// Two parties of one mode each, coupled by a beam splitter g.
inline MachineSpec two_mode(double w1, double w2, double g, const BathModel& b1, const BathModel& b2,
                            bool lamb = true)
{
    MachineSpec m;
    m.network.H.resize(2, 2);
    m.network.H << w1, g, g, w2;
    m.network.partition = {{0}, {1}};
    m.network.eta = {0, 1};
    m.baths = {b1, b2};
    m.options.lamb = lamb;
    return m;
}

// Degenerate pair sharing one bath through (a1 + a2)/sqrt2.
inline MachineSpec dark_mode_machine()
{
    MachineSpec m;
    m.network.H = Eigen::MatrixXcd::Identity(2, 2);
    m.network.partition = {{0, 1}};
    m.network.eta = {0, 0};
    Eigen::VectorXcd u(2);
    u << 1.0, 1.0;
    BathModel b = make_bath(Statistics::Bosonic, 1.0, 0.0, 0.05);
    b.J = SpectralDensity::rank_one(Profile::Flat, 0.05, 5.0, u / std::sqrt(2.0));
    m.baths = {b};
    return m;
}

inline double bose(double omega, double beta, double mu = 0.0)
{
    return 1.0 / (std::exp(beta * (omega - mu)) - 1.0);
}

inline double fermi(double omega, double beta)
{
    return 1.0 / (std::exp(beta * omega) + 1.0);
}

// Principal value of int_a^b f(x)/(x - p) dx by singularity subtraction,
//   int (f(x) - f(p))/(x - p) dx + f(p) ln((b - p)/(p - a)),
// with composite Simpson on a uniform grid (f smooth, a < p < b).
inline double pv_subtracted(const std::function<double(double)>& f, double a, double b, double p, int n = 400000)
{
    const double fp = f(p);
    auto g = [&](double x) {
        const double dx = x - p;
        if (std::abs(dx) < 1e-9) {
            const double h = 1e-5;
            return (f(p + h) - f(p - h)) / (2.0 * h);
        }
        return (f(x) - fp) / dx;
    };
    const double h = (b - a) / n;
    double s = g(a) + g(b);
    for (int k = 1; k < n; ++k) s += g(a + k * h) * (k % 2 ? 4.0 : 2.0);
    return s * h / 3.0 + fp * std::log((b - p) / (p - a));
}

// Solves A X + X A^dag + Q = 0 through the vectorized Kronecker system.
inline Eigen::MatrixXcd lyapunov_kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& q)
{
    const Index n = a.rows();
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
    Eigen::MatrixXcd big = Eigen::MatrixXcd::Zero(n * n, n * n);
    // vec(A X) = (I (x) A) vec X, vec(X A^dag) = (conj(A) (x) I) vec X.
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) {
            big.block(i * n, j * n, n, n) += id(i, j) * a;
            big.block(i * n, j * n, n, n) += std::conj(a(i, j)) * id;
        }
    const Eigen::VectorXcd rhs = -Eigen::Map<const Eigen::VectorXcd>(q.data(), n * n);
    const Eigen::VectorXcd x = big.fullPivLu().solve(rhs);
    return Eigen::Map<const Eigen::MatrixXcd>(x.data(), n, n);
}

inline double max_abs(const Eigen::MatrixXcd& m)
{
    return m.size() ? m.cwiseAbs().maxCoeff() : 0.0;
}

} // namespace qtm::testing
