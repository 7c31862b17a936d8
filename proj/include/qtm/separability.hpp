// separability.hpp - Quadrature covariance matrices, physicality, the
// vacuum-dominance certificate and PPT log-negativity
//
// Quadratures are q = (a + a^dag)/sqrt2, p = (a - a^dag)/(i sqrt2), ordered
// (q1, p1, ..., qd, pd); sigma_jk = <{dx_j, dx_k}>/2, so the vacuum is I/2.
// Log-negativity is reported in bits (base-2 logarithm).

#pragma once

#include <string>
#include <vector>

#include "qtm/dynamics.hpp"

namespace qtm {

struct CovarianceMatrix {
    Eigen::MatrixXd sigma;
    Eigen::VectorXd mean;

    Index modes() const { return sigma.rows() / 2; }
    static CovarianceMatrix vacuum(Index d);
};

/// Symplectic form, blocks [[0, 1], [-1, 0]] per mode.
Eigen::MatrixXd symplectic_form(Index d);

/// sigma' = T sigma T^dag for (a_1..a_d, a_1^dag..a_d^dag) = T x.
Eigen::MatrixXcd to_complex_form(const CovarianceMatrix& cov);
CovarianceMatrix from_complex_form(const Eigen::MatrixXcd& v, const Eigen::VectorXcd& mean_a);

/// Covariance matrix of a state given in the physical mode basis.
CovarianceMatrix covariance_from_state(const GaussianState& physical);

/// min eigenvalue of sigma + (i/2) Omega.
double uncertainty_margin(const CovarianceMatrix& cov);
bool is_physical(const CovarianceMatrix& cov, double tol = 1e-9);
/// min eigenvalue of sigma - I/2.
double vacuum_margin(const CovarianceMatrix& cov);
bool vacuum_dominance(const CovarianceMatrix& cov, double tol = 1e-9);

/// Symplectic eigenvalues (ascending), |eig(i Omega sigma)| taken once per pair.
Eigen::VectorXd symplectic_eigenvalues(const Eigen::MatrixXd& sigma);

/// sum_k max(0, -log2(2 nu_k)) for the partial transpose on side_b (p -> -p
/// on those modes). Throws DomainError for a non-physical input.
double log_negativity(const CovarianceMatrix& cov, const std::vector<Index>& side_b, double tol = 1e-9);

enum class Verdict { Separable, Entangled, Undetermined };
std::string to_string(Verdict v);

struct Bipartition {
    std::vector<int> parties_a; // party indices on side A
    std::vector<Index> modes_a;
    std::vector<Index> modes_b;
    std::string label() const;
};

/// Party-vs-rest and contiguous splits (deduplicated), or every split when
/// all is set. Parties are lists of physical modes.
std::vector<Bipartition> bipartitions(const std::vector<std::vector<Index>>& parties, bool all = false);

struct SeparabilityReport {
    struct Entry {
        Bipartition split;
        double log_negativity{0.0};
        Verdict verdict{Verdict::Undetermined};
    };
    bool physical{false};
    bool unsqueezed{false};
    bool vacuum_dominant{false};
    double uncertainty_margin{0.0};
    double vacuum_margin{0.0};
    double squeezing_block{0.0}; // max |off-diagonal block| of the complex form
    std::vector<Entry> entries;

    bool any_entangled() const;
};

/// A single party is split into its modes.
SeparabilityReport analyze_separability(const CovarianceMatrix& cov, std::vector<std::vector<Index>> parties,
                                        bool all_bipartitions = false, double tol = 1e-9);

std::string format_report(const SeparabilityReport& r);
/// One row per bipartition: split,log_negativity,verdict
std::string format_csv(const SeparabilityReport& r);

} // namespace qtm
