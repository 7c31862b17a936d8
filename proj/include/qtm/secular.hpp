// secular.hpp - Bogoliubov diagonalization, eigenspace grouping and the
// secular rate / Lamb-shift blocks of the global and local master equations

#pragma once

#include <random>
#include <span>
#include <string>
#include <vector>

#include "qtm/model.hpp"

namespace qtm {

struct StabilityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Eigenspace {
    double omega{0.0};        // representative frequency (mean of the grouped values)
    int subsystem{-1};        // owning subsystem in local mode, -1 in global mode
    std::vector<Index> modes; // Bogoliubov mode indices
};

struct SecularDecomposition {
    Regime regime{Regime::Global};
    Eigen::MatrixXcd U;              // a = U b
    Eigen::VectorXd omegas;          // eigenfrequency of each Bogoliubov mode
    std::vector<int> mode_subsystem; // -1 for every mode in global mode
    std::vector<Eigenspace> eigenspaces;
    Eigen::MatrixXcd h_system;       // U^dagger H U
    Eigen::MatrixXcd hC;             // inter-subsystem part of h_system (local mode)

    // Per-eigenspace blocks, filled by assemble_rates / assemble_lamb.
    std::vector<Eigen::MatrixXcd> gamma1;
    std::vector<Eigen::MatrixXcd> gamma2;
    std::vector<Eigen::MatrixXcd> phi;
    double lamb_error{0.0}; // accumulated quadrature error estimate

    std::vector<std::string> warnings;

    Index d() const { return U.rows(); }
    bool has_rates() const { return gamma1.size() == eigenspaces.size() && !eigenspaces.empty(); }
    // d x d matrix with the per-eigenspace blocks placed on their modes.
    Eigen::MatrixXcd embed(const std::vector<Eigen::MatrixXcd>& blocks) const;
};

/// Diagonalizes H (global) or each subsystem block H_n (local) and groups
/// eigenfrequencies within degeneracy_tol * max|w| into eigenspaces.
/// A non-null gauge_rng applies a Haar-random unitary inside every
/// multi-mode eigenspace. Throws StabilityError for a non-positive eigenvalue.
SecularDecomposition diagonalize(const MachineSpec& spec, std::mt19937_64* gauge_rng = nullptr);

/// Gamma^(1), Gamma^(2) blocks at each eigenspace frequency. Throws
/// ValidationError when a block is not PSD within psd_tol.
SecularDecomposition assemble_rates(SecularDecomposition dec, const MachineSpec& spec);

/// Lamb-shift blocks phi (zero when the Lamb toggle is off).
SecularDecomposition assemble_lamb(SecularDecomposition dec, const MachineSpec& spec);

/// diagonalize + assemble_rates + assemble_lamb.
SecularDecomposition decompose(const MachineSpec& spec, std::mt19937_64* gauge_rng = nullptr);

/// Groups ascending values; returns index groups. Sets chain_warning when a
/// transitively grouped chain spans more than tol.
std::vector<std::vector<Index>> group_frequencies(std::span<const double> sorted, double tol,
                                                  bool* chain_warning = nullptr);

/// min |nu - nu'| over distinct Bohr differences nu = w_i - w_j (values
/// closer than tol count as equal); +inf when fewer than two distinct nu.
double min_bohr_gap(std::span<const double> freqs, double tol);

struct SecularGapReport {
    struct Entry {
        int subsystem{-1};
        std::vector<double> frequencies;
        double min_gap{0.0};
    };
    std::vector<Entry> entries;
    double min_gap{0.0};
    double tau_b{0.0};
    double inverse_tau_b{0.0};
    bool pass{false};
    std::vector<std::string> warnings;
};

SecularGapReport secular_gap(const SecularDecomposition& dec, const MachineSpec& spec);
std::string format_gap_report(const SecularGapReport& report);

} // namespace qtm
