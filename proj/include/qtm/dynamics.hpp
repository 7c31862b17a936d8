// dynamics.hpp - Closed first- and second-moment dynamics of the secular
// master equations, steady states and uniqueness certification

#pragma once

#include <optional>
#include <string>

#include "qtm/secular.hpp"

namespace qtm {

enum class Basis { BogoliubovGlobal, BogoliubovLocal, Physical };
std::string to_string(Basis b);

// Coefficients of the master equation in the Bogoliubov basis b (a = U b):
//   H_eff = b^dag h b + 1/2 (b^dag K b^dag + h.c.)
//   dissipator  sum_uv gamma1_uv D(b_u^dag, b_v^dag) + gamma2_uv D(b_u, b_v)
// gamma1/gamma2 are the embedded secular blocks; K (pairing) is zero unless a
// counterfactual squeezing term was injected.
struct GeneratorData {
    Basis basis{Basis::BogoliubovGlobal};
    Eigen::MatrixXcd U;
    Eigen::MatrixXcd h;
    Eigen::MatrixXcd gamma1;
    Eigen::MatrixXcd gamma2;
    Eigen::MatrixXcd pairing;

    Index d() const { return h.rows(); }
};

GeneratorData generator_data(const SecularDecomposition& dec);

// Moment equations, with b = <b>, n_jk = <b_j^dag b_k>, beta_jk = <b_j b_k> - <b_j><b_k>:
//   db/dt    = R b                       R = -i h + (gamma1 - gamma2^T) / 2
//   dn/dt    = G n + n G^dag + F         G = conj(R), F = conj(gamma1)
//   dbeta/dt = Rbeta beta + beta Rbeta^T Rbeta = R
// A non-zero pairing couples b to conj(b) and n to beta; drift()/diffusion()
// give the general form for the vector (b, b^dag).
struct MomentDynamics {
    GeneratorData data;
    Eigen::MatrixXcd R;
    Eigen::MatrixXcd G;
    Eigen::MatrixXcd F;
    Eigen::MatrixXcd Rbeta;
    bool counterfactual{false};

    Index d() const { return R.rows(); }
    // Drift A of the 2d vector (b, b^dag).
    Eigen::MatrixXcd drift() const;
    // Diffusion of the symmetrized complex covariance V = 1/2 <{dx, dx^dag}>,
    // so that dV/dt = A V + V A^dag + D.
    Eigen::MatrixXcd diffusion() const;
    // (gamma1 - gamma2^T) / 2: the dissipative part of R.
    Eigen::MatrixXcd dissipative_drift() const;
    // sum_u (gamma2_uu - gamma1_uu): total number-damping rate.
    double total_damping() const;
};

MomentDynamics build_moment_dynamics(GeneratorData data);
MomentDynamics build_moment_dynamics(const SecularDecomposition& dec);

struct GaussianState {
    Eigen::VectorXcd mean; // <b_j>
    Eigen::MatrixXcd n;    // <b_j^dag b_k>
    Eigen::MatrixXcd beta; // <b_j b_k> - <b_j><b_k>
    Basis basis{Basis::BogoliubovGlobal};

    Index d() const { return mean.size(); }
    static GaussianState vacuum(Index d, Basis basis);
    // Centered occupation <b_j^dag b_k> - conj(<b_j>) <b_k>.
    Eigen::MatrixXcd centered_n() const;
    // V = [[n_c^T + 1/2, beta], [conj(beta), n_c + 1/2]].
    Eigen::MatrixXcd complex_covariance() const;
    static GaussianState from_complex_covariance(const Eigen::VectorXcd& mean, const Eigen::MatrixXcd& v,
                                                 Basis basis);
};

/// Maps moments of b to moments of a = U b (tagged Physical).
GaussianState to_physical(const GaussianState& state, const Eigen::MatrixXcd& U);
/// Inverse of to_physical.
GaussianState from_physical(const GaussianState& state, const Eigen::MatrixXcd& U, Basis basis);

struct IntegratorError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Exact propagation by matrix exponentials (interval doubling for the
/// inhomogeneous covariance term).
GaussianState evolve(const MomentDynamics& dyn, const GaussianState& state, double t);

struct UniquenessReport {
    enum class Status { Unique, NonUnique, NonRelaxing, Unstable };
    Status status{Status::NonUnique};
    bool r_invertible{false};
    double r_condition{0.0};        // sigma_max / sigma_min of R
    bool rotating_singular{false};  // R - i Im(lambda) singular for an eigenvalue lambda of R
    int non_decaying_modes{0};      // eigenvalues of the drift with Re >= -tol
    double max_real_R{0.0};
    double max_real_drift{0.0};     // of the full (b, b^dag) drift
    double max_real_second_moment{0.0};
    bool hurwitz{false};
    std::string message;

    bool unique() const { return status == Status::Unique; }
};
std::string to_string(UniquenessReport::Status s);
std::string format_report(const UniquenessReport& r);

struct SteadyResult {
    UniquenessReport report;
    std::optional<GaussianState> state;
};

/// Certifies uniqueness (R invertible with no non-decaying mode, drift
/// Hurwitz) and solves the Lyapunov equation for the second moments.
SteadyResult steady_state(const MomentDynamics& dyn);

struct RhDiagnostic {
    double max_eigenvalue{0.0};
    bool pass{false};
};
/// Max eigenvalue of the Hermitian part of the dissipative drift.
RhDiagnostic check_RH_negative(const MomentDynamics& dyn, double tol = 1e-12);

/// Counterfactual: adds H = i s (a_i^dag a_j^dag - a_i a_j) on physical modes
/// i != j, or H = i s/2 (a_i^dag^2 - a_i^2) when i == j. Breaks excitation-number
/// conservation; not part of the modelled machines.
MomentDynamics inject_squeezing(const MomentDynamics& dyn, double strength, Index mode_i, Index mode_j);

} // namespace qtm
