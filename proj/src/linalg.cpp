// linalg.cpp - Dense linear-algebra helpers

#include "qtm/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <unsupported/Eigen/MatrixFunctions>

namespace qtm::linalg {

using cd = std::complex<double>;

MatrixXcd hermitian_part(const MatrixXcd& m)
{
    return 0.5 * (m + m.adjoint());
}

double hermiticity_defect(const MatrixXcd& m)
{
    if (m.size() == 0) return 0.0;
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    return (m - m.adjoint()).cwiseAbs().maxCoeff() / scale;
}

double min_eigenvalue(const MatrixXcd& hermitian)
{
    if (hermitian.size() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(hermitian_part(hermitian), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

double max_eigenvalue(const MatrixXcd& hermitian)
{
    if (hermitian.size() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(hermitian_part(hermitian), Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

MatrixXcd kron(const MatrixXcd& a, const MatrixXcd& b)
{
    MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

MatrixXcd solve_lyapunov(const MatrixXcd& a, const MatrixXcd& q)
{
    const Eigen::Index n = a.rows();
    if (a.cols() != n || q.rows() != n || q.cols() != n) {
        throw std::invalid_argument("solve_lyapunov: shape mismatch");
    }
    // A = Z T Z^dagger with T upper triangular. With Y = Z^dagger X Z and
    // C = Z^dagger Q Z the equation becomes T Y + Y T^dagger = -C.
    Eigen::ComplexSchur<MatrixXcd> schur(a);
    const MatrixXcd& T = schur.matrixT();
    const MatrixXcd& Z = schur.matrixU();
    const MatrixXcd C = Z.adjoint() * q * Z;

    // Column j of Y T^dagger involves conj(T(j, k)) Y(:, k) for k >= j, so
    // columns are solved from last to first; each column is an upper
    // triangular system (T + conj(T(j, j)) I) y_j = rhs.
    MatrixXcd Y = MatrixXcd::Zero(n, n);
    for (Eigen::Index j = n - 1; j >= 0; --j) {
        Eigen::VectorXcd rhs = -C.col(j);
        for (Eigen::Index k = j + 1; k < n; ++k) {
            rhs -= std::conj(T(j, k)) * Y.col(k);
        }
        const cd shift = std::conj(T(j, j));
        for (Eigen::Index i = n - 1; i >= 0; --i) {
            cd acc = rhs(i);
            for (Eigen::Index k = i + 1; k < n; ++k) acc -= T(i, k) * Y(k, j);
            const cd diag = T(i, i) + shift;
            if (std::abs(diag) == 0.0) {
                throw std::runtime_error("solve_lyapunov: singular Lyapunov operator");
            }
            Y(i, j) = acc / diag;
        }
    }
    return Z * Y * Z.adjoint();
}

MatrixXcd expm(const MatrixXcd& m)
{
    return m.exp();
}

MatrixXcd random_unitary(Eigen::Index n, std::mt19937_64& rng)
{
    std::normal_distribution<double> normal(0.0, 1.0);
    MatrixXcd g(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) g(i, j) = cd(normal(rng), normal(rng));
    Eigen::HouseholderQR<MatrixXcd> qr(g);
    MatrixXcd qmat = qr.householderQ() * MatrixXcd::Identity(n, n);
    const MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < n; ++j) {
        const double mag = std::abs(r(j, j));
        if (mag > 0.0) qmat.col(j) *= r(j, j) / mag;
    }
    return qmat;
}

Eigen::VectorXd singular_values(const MatrixXcd& m)
{
    Eigen::JacobiSVD<MatrixXcd> svd(m);
    return svd.singularValues();
}

} // namespace qtm::linalg
