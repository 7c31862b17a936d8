// spectra.hpp - Rate (Hermitian) and Lamb-shift (anti-Hermitian) parts of the
// one-sided Fourier transforms of the bath correlation functions

#pragma once

#include <functional>
#include <stdexcept>

#include "qtm/model.hpp"

namespace qtm {

struct RateSample {
    double omega{0.0};
    Eigen::MatrixXcd gamma1; // absorption from the bath, J(w) p(w)
    Eigen::MatrixXcd gamma2; // emission into the bath, J(w)^T (1 - xi p(w))
    Eigen::MatrixXcd s1;
    Eigen::MatrixXcd s2;
};

struct QuadratureError : std::runtime_error {
    QuadratureError(const std::string& what, double achieved)
        : std::runtime_error(what), achieved_error(achieved) {}
    double achieved_error;
};

struct PvResult {
    double value{0.0};
    double error{0.0};
};

/// Principal value of  integral_a^b f(x) / (x - pole) dx.
///
/// A pole inside (a, b) is handled by pairing points symmetrically around it,
///   PV = integral_0^delta [f(pole + t) - f(pole - t)] / t dt + (regular remainder),
/// with delta the distance to the nearer endpoint. f must be smooth on [a, b].
/// Integration is adaptive Gauss-Kronrod; throws QuadratureError when the
/// error estimate exceeds rel_tol times the L1 norm of the integrand.
PvResult principal_value(const std::function<double(double)>& f, double a, double b, double pole,
                         double rel_tol = 1e-10);

/// gamma^(n,1), gamma^(n,2) at omega; zero for omega < 0 (non-negative bath spectra).
RateSample rates(const BathModel& bath, double omega);

/// s^(n,1), s^(n,2) at omega by principal-value quadrature over [0, cutoff]:
///   s1 = (1/2pi) PV int J(e) p(e) / (e - w) de
///   s2 = -(1/2pi) PV int J(e)^T (1 - xi p(e)) / (e - w) de
/// Bosonic baths whose spectral density is non-zero at e = mu make s1 and s2
/// separately divergent (their sum stays finite, see lamb_kernel); this is
/// reported as a QuadratureError.
RateSample lamb_shifts(const BathModel& bath, double omega, double cutoff);

/// Combination s1(w) + s2(w)^T entering the Lamb-shift Hamiltonian,
///   (1/2pi) PV int J(e) [(1 + xi) p(e) - 1] / (e - w) de,
/// which is finite for every valid bath. Hermitian.
Eigen::MatrixXcd lamb_kernel(const BathModel& bath, double omega, double cutoff,
                             double* error_estimate = nullptr);

/// Scalar factor of lamb_kernel (the matrix is this times J.coupling).
PvResult lamb_kernel_scalar(const BathModel& bath, double omega, double cutoff);

} // namespace qtm
