// pipeline.hpp - Model -> secular decomposition -> steady state -> separability

#pragma once

#include <optional>
#include <string>

#include "qtm/separability.hpp"

namespace qtm {

struct PipelineOptions {
    bool all_bipartitions{false};
    // Counterfactual squeezing strength in units of the total damping rate.
    std::optional<double> counterfactual_squeeze;
};

struct PipelineResult {
    SecularDecomposition dec;
    SecularGapReport gap;
    MomentDynamics dyn;
    RhDiagnostic rh;
    double squeeze_strength{0.0};
    SteadyResult steady;
    std::optional<GaussianState> physical;
    std::optional<CovarianceMatrix> cov;
    std::optional<SeparabilityReport> separability;

    double max_log_negativity() const;
};

/// Physical modes receiving the counterfactual pairing term: the first mode
/// of the first two parties (or of the first party, or mode 0 twice).
std::pair<Index, Index> squeeze_modes(const MachineSpec& spec);

PipelineResult run_pipeline(const MachineSpec& spec, const PipelineOptions& opts = {});

enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitInvalid = 2, kExitNonUnique = 3, kExitEntangled = 4 };
int exit_code(const PipelineResult& r);

std::string format_steady_report(const PipelineResult& r);
/// Rows "i,j,value" of a real matrix.
std::string matrix_csv(const Eigen::MatrixXd& m);

} // namespace qtm
