// spectra.cpp - Bath rates and principal-value Lamb-shift integrals

#include "qtm/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace qtm {

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
constexpr unsigned kMaxDepth = 25;

struct Piece {
    double value{0.0};
    double error{0.0};
    double l1{0.0};
};

Piece integrate(const std::function<double(double)>& g, double a, double b, double rel_tol)
{
    Piece p;
    if (!(b > a)) return p;
    p.value = GK::integrate(g, a, b, kMaxDepth, rel_tol, &p.error, &p.l1);
    return p;
}

// Upper end of the Lamb integration domain.
double upper_limit(const BathModel& bath, double cutoff)
{
    if (!(cutoff > 0.0)) throw DomainError("Lamb-shift cutoff must be > 0");
    return std::min(cutoff, bath.J.support_end());
}

PvResult weighted_pv(const BathModel& bath, double omega, double cutoff,
                     const std::function<double(double)>& weight)
{
    const double b = upper_limit(bath, cutoff);
    auto f = [&](double e) { return bath.J.profile_at(e) * weight(e); };
    PvResult r = principal_value(f, 0.0, b, omega);
    r.value /= 2.0 * std::numbers::pi;
    r.error /= 2.0 * std::numbers::pi;
    return r;
}

// (1 + xi) p(e) - 1: -1 for bosonic baths, -tanh(beta e / 2) for spin baths.
double lamb_weight(const BathModel& bath, double e)
{
    if (bath.statistics == Statistics::Bosonic) return -1.0;
    if (bath.beta == 0.0) return 0.0;
    if (std::isinf(bath.beta)) return e > 0.0 ? -1.0 : (e < 0.0 ? 1.0 : 0.0);
    return -std::tanh(0.5 * bath.beta * (e - bath.mu));
}

} // namespace

PvResult principal_value(const std::function<double(double)>& f, double a, double b, double pole,
                         double rel_tol)
{
    if (!(b > a)) return {};
    std::vector<Piece> pieces;
    auto regular = [&](double lo, double hi) {
        pieces.push_back(integrate([&](double x) { return f(x) / (x - pole); }, lo, hi, rel_tol));
    };

    if (pole <= a || pole >= b) {
        const double edge = pole <= a ? a : b;
        if (pole == edge && f(edge) != 0.0) {
            throw QuadratureError("principal value diverges: pole on an integration endpoint with non-zero density",
                                  std::numeric_limits<double>::infinity());
        }
        regular(a, b);
    } else {
        const double delta = std::min(pole - a, b - pole);
        pieces.push_back(integrate(
            [&](double t) { return (f(pole + t) - f(pole - t)) / t; }, 0.0, delta, rel_tol));
        if (pole - a > delta) regular(a, pole - delta);
        if (b - pole > delta) regular(pole + delta, b);
    }

    PvResult out;
    double l1 = 0.0;
    for (const auto& p : pieces) {
        out.value += p.value;
        out.error += p.error;
        l1 += p.l1;
    }
    const double budget = 1e-8 * std::max(l1, std::abs(out.value));
    if (!std::isfinite(out.value) || !(out.error <= budget || out.error < 1e-300)) {
        throw QuadratureError("principal-value quadrature did not converge (error estimate " +
                                  std::to_string(out.error) + ")",
                              out.error);
    }
    return out;
}

RateSample rates(const BathModel& bath, double omega)
{
    RateSample s;
    s.omega = omega;
    const Index n = bath.J.coupling.rows();
    s.gamma1 = Eigen::MatrixXcd::Zero(n, n);
    s.gamma2 = Eigen::MatrixXcd::Zero(n, n);
    s.s1 = Eigen::MatrixXcd::Zero(n, n);
    s.s2 = Eigen::MatrixXcd::Zero(n, n);
    if (omega < 0.0) return s;
    const double kappa = bath.J.profile_at(omega);
    if (kappa == 0.0) return s;
    const double p = occupation(bath, omega);
    s.gamma1 = (kappa * p) * bath.J.coupling;
    s.gamma2 = (kappa * (1.0 - bath.xi() * p)) * bath.J.coupling.transpose();
    return s;
}

RateSample lamb_shifts(const BathModel& bath, double omega, double cutoff)
{
    RateSample s;
    s.omega = omega;
    const Index n = bath.J.coupling.rows();
    s.gamma1 = Eigen::MatrixXcd::Zero(n, n);
    s.gamma2 = Eigen::MatrixXcd::Zero(n, n);
    if (bath.statistics == Statistics::Bosonic && bath.mu >= 0.0 && bath.J.profile_at(bath.mu) > 0.0) {
        throw QuadratureError("bosonic occupation diverges inside the spectral band at e = mu; "
                              "s1 and s2 are separately infinite",
                              std::numeric_limits<double>::infinity());
    }
    auto p = [&](double e) {
        if (bath.statistics == Statistics::Bosonic && e <= bath.mu) return 0.0;
        return occupation(bath, e);
    };
    const PvResult r1 = weighted_pv(bath, omega, cutoff, p);
    const PvResult r2 = weighted_pv(bath, omega, cutoff, [&](double e) { return 1.0 - bath.xi() * p(e); });
    s.s1 = r1.value * bath.J.coupling;
    s.s2 = -r2.value * bath.J.coupling.transpose();
    return s;
}

PvResult lamb_kernel_scalar(const BathModel& bath, double omega, double cutoff)
{
    return weighted_pv(bath, omega, cutoff, [&](double e) { return lamb_weight(bath, e); });
}

Eigen::MatrixXcd lamb_kernel(const BathModel& bath, double omega, double cutoff, double* error_estimate)
{
    if (bath.J.strength == 0.0) {
        if (error_estimate) *error_estimate = 0.0;
        return Eigen::MatrixXcd::Zero(bath.J.coupling.rows(), bath.J.coupling.cols());
    }
    const PvResult r = lamb_kernel_scalar(bath, omega, cutoff);
    if (error_estimate) *error_estimate = r.error;
    return r.value * bath.J.coupling;
}

} // namespace qtm
