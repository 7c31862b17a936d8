// linalg.hpp - Dense linear-algebra helpers shared by the solvers

#pragma once

#include <random>

#include <Eigen/Dense>

namespace qtm::linalg {

using Eigen::MatrixXcd;

MatrixXcd hermitian_part(const MatrixXcd& m);

// Max |m - m^dagger| entry relative to max(1, |m|_max).
double hermiticity_defect(const MatrixXcd& m);

double min_eigenvalue(const MatrixXcd& hermitian);
double max_eigenvalue(const MatrixXcd& hermitian);

MatrixXcd kron(const MatrixXcd& a, const MatrixXcd& b);

// Solves A X + X A^dagger + Q = 0 by the complex Bartels-Stewart method.
// Requires lambda_i(A) + conj(lambda_j(A)) != 0 for all i, j.
MatrixXcd solve_lyapunov(const MatrixXcd& a, const MatrixXcd& q);

MatrixXcd expm(const MatrixXcd& m);

// Haar-random unitary (QR of a Ginibre matrix with phase fix).
MatrixXcd random_unitary(Eigen::Index n, std::mt19937_64& rng);

// Singular values of m, descending.
Eigen::VectorXd singular_values(const MatrixXcd& m);

} // namespace qtm::linalg
