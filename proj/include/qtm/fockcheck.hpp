// fockcheck.hpp - Brute-force Lindblad generator on a truncated Fock space,
// used as an independent check of the moment dynamics (one or two modes)

#pragma once

#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "qtm/dynamics.hpp"

namespace qtm {

using SparseC = Eigen::SparseMatrix<cd>;

// Density matrices are vectorized column-major: vec(A rho B) = (B^T (x) A) vec(rho).
// Basis index of |n_0, n_1> is n_0 (cutoff + 1) + n_1.
struct TruncatedGenerator {
    int cutoff{0};
    Index modes{0};
    Index dimension{0};
    SparseC L;
    std::vector<SparseC> b; // truncated annihilators of the Bogoliubov modes
    SparseC number;         // total excitation number
    GeneratorData data;
    double trace_residual{0.0}; // max |vec(I)^dag L|

    Index super_dimension() const { return dimension * dimension; }
};

struct DimensionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Hamiltonian b^dag h b + (b^dag K b^dag + h.c.)/2 plus one jump operator per
/// eigenvector of each PSD rate matrix. Requires d <= 2 and cutoff >= 2.
TruncatedGenerator build_generator(const GeneratorData& data, int cutoff);
TruncatedGenerator build_generator(const SecularDecomposition& dec, int cutoff);

/// Frobenius norm of [L, N] with N = [N_total, .].
double number_commutator_norm(const TruncatedGenerator& gen);

struct FockMoments {
    double t{0.0};
    Eigen::VectorXcd mean;
    Eigen::MatrixXcd n;
    Eigen::MatrixXcd beta; // centered
    double leak{0.0};      // population with some mode at the cutoff
};

FockMoments fock_moments(const TruncatedGenerator& gen, const Eigen::MatrixXcd& rho);
double truncation_leak(const TruncatedGenerator& gen, const Eigen::MatrixXcd& rho);

Eigen::MatrixXcd fock_vacuum(const TruncatedGenerator& gen);
Eigen::MatrixXcd fock_number_state(const TruncatedGenerator& gen, const std::vector<int>& occupations);
/// Product of truncated, renormalized coherent states.
Eigen::MatrixXcd fock_coherent(const TruncatedGenerator& gen, const Eigen::VectorXcd& alpha);
/// Product of truncated, renormalized thermal states with mean occupations nbar.
Eigen::MatrixXcd fock_thermal(const TruncatedGenerator& gen, const std::vector<double>& nbar);

struct OracleTrajectory {
    std::vector<FockMoments> samples;
    double max_leak{0.0};
    std::vector<std::string> warnings;
};

/// Adaptive Runge-Kutta-Fehlberg 7(8) integration of d vec(rho)/dt = L vec(rho)
/// from rho(0) = rho0, sampled at the given ascending times.
OracleTrajectory oracle_moments(const TruncatedGenerator& gen, const Eigen::MatrixXcd& rho0,
                                const std::vector<double>& times);

struct OracleSteady {
    bool solved{false};
    Eigen::MatrixXcd rho;
    FockMoments moments;
    int null_dimension{-1}; // -1 when the superoperator is too large for a dense spectrum
    double spectral_gap{0.0};
    double sector_coherence{0.0}; // max |rho_ij| between different total-number sectors
    std::vector<std::string> warnings;
};

/// Kernel of L with the trace constraint (ILUT-preconditioned BiCGSTAB, sparse
/// LU fallback); null-space dimension and spectral gap from the dense spectrum
/// when super_dimension <= dense_limit.
OracleSteady oracle_steady(const TruncatedGenerator& gen, Index dense_limit = 2500);

/// Smallest cutoff (stepping by 2 from start, capped at 40) whose steady
/// state has truncation leak below tol.
int auto_cutoff(const GeneratorData& data, int start = 4, double tol = 1e-8);

} // namespace qtm
