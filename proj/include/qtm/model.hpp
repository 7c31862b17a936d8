// model.hpp - Machine description: system modes, parties, thermal baths, options

#pragma once

#include <complex>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qtm {

using cd = std::complex<double>;
using Index = Eigen::Index;

/// Malformed model file (syntax or missing/ill-typed keys).
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A well-formed model that violates a physical or structural invariant.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Argument outside the domain of a function (e.g. occupation below the chemical potential).
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

enum class Statistics { Bosonic, Spin };
enum class Profile { Flat, Ohmic };
enum class Regime { Global, Local };

std::string to_string(Statistics s);
std::string to_string(Profile p);
std::string to_string(Regime r);
Regime parse_regime(const std::string& text);

// J(w) = strength * shape(w) * coupling, with shape(w) = 0 for w < 0.
//   flat:  shape = 1 on [0, cutoff]
//   ohmic: shape = (w / cutoff) * exp(-w / cutoff)
struct SpectralDensity {
    Profile profile{Profile::Flat};
    double strength{0.0};
    double cutoff{1.0};
    Eigen::MatrixXcd coupling; // |S_n| x |S_n| Hermitian PSD

    double shape(double omega) const;
    double profile_at(double omega) const { return strength * shape(omega); }
    Eigen::MatrixXcd operator()(double omega) const { return profile_at(omega) * coupling; }
    // Upper end of the support (infinity for ohmic).
    double support_end() const;

    // Rank-1 collective coupling J = kappa(w) u u^dagger.
    static SpectralDensity rank_one(Profile profile, double strength, double cutoff,
                                    const Eigen::VectorXcd& u);
};

struct BathModel {
    Statistics statistics{Statistics::Bosonic};
    double beta{1.0};   // inverse temperature, may be +inf
    double mu{0.0};     // chemical potential, zero for spin baths
    SpectralDensity J;
    double tau_b{0.0};  // bath correlation time, diagnostic only

    // xi = -1 for bosonic baths, +1 for spin baths.
    double xi() const { return statistics == Statistics::Bosonic ? -1.0 : 1.0; }
};

struct NetworkModel {
    Eigen::MatrixXcd H;                       // single-particle matrix, H_S = a^dag H a
    std::vector<std::vector<Index>> partition; // zero-based mode indices per party
    std::vector<int> eta;                     // 0: number-conserving, 1: position-like coupling

    Index d() const { return H.rows(); }
};

struct MachineOptions {
    Regime regime{Regime::Global};
    bool lamb{true};
    std::optional<double> lamb_cutoff; // default: 10 x max system frequency
    double reference_frequency{1.0};   // unit of all frequencies in the file
    double hermiticity_tol{1e-10};
    double degeneracy_tol{1e-8};
    double psd_tol{1e-9};
};

struct MachineSpec {
    NetworkModel network;
    std::vector<BathModel> baths;
    MachineOptions options;

    Index d() const { return network.d(); }
    // Lamb integration cutoff actually used.
    double lamb_cutoff() const;
};

/// Bose-Einstein (xi = -1) or Fermi-Dirac (xi = +1) occupation at energy omega.
/// Throws DomainError for bosonic baths when omega <= mu.
double occupation(const BathModel& bath, double omega);

/// Throws ValidationError naming the first violated invariant.
void validate(const MachineSpec& spec);

MachineSpec parse_machine(const std::string& text);
MachineSpec load_machine(const std::filesystem::path& path);
std::string format_machine(const MachineSpec& spec);
void save_machine(const MachineSpec& spec, const std::filesystem::path& path);

// Complex numbers in model files are written as "re+imj".
cd parse_complex(const std::string& text);
std::string format_complex(cd z);

} // namespace qtm
