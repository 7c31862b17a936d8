// sweep.hpp - Random machine ensemble and the parallel steady-state sweep

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qtm/pipeline.hpp"

namespace qtm {

// Ensemble of random machines:
//   H = g * GUE + shift, shifted so that its lowest eigenvalue is uniform in
//   [omega_min_lo, omega_min_hi]; parties are random contiguous cuts of a
//   shuffled mode list; each bath is bosonic or spin with equal probability,
//   temperature log-uniform in [t_lo, t_hi], bosonic mu uniform below the
//   lowest eigenfrequency, flat or ohmic J with a random rank-1 coupling and
//   strength <= kappa_max * (lowest eigenfrequency).
struct EnsembleParams {
    double gue_scale{0.5};
    double omega_min_lo{0.5};
    double omega_min_hi{1.5};
    double t_lo{0.1};
    double t_hi{10.0};
    double kappa_max{0.05};
};

struct SweepConfig {
    int count{200};
    Index d_min{2};
    Index d_max{6};
    int parties_min{2};
    int parties_max{3};
    std::vector<Regime> regimes{Regime::Global, Regime::Local};
    std::vector<bool> lamb{true, false};
    std::uint64_t seed{1};
    std::optional<double> counterfactual; // squeezing strength / total damping
    bool all_bipartitions{false};
    int workers{0}; // 0: QTM_WORKERS or the hardware concurrency
    EnsembleParams ensemble;

    /// Throws ValidationError for empty ranges.
    void validate() const;
};

/// Seed of item `index` derived from the sweep seed (SplitMix64).
std::uint64_t item_seed(std::uint64_t seed, std::uint64_t index);

/// Random valid machine with d modes and the given number of parties (d >= parties >= 1).
MachineSpec random_machine(std::uint64_t seed, Index d, int parties, const EnsembleParams& params = {});

struct SweepRow {
    int index{0};
    std::uint64_t seed{0};
    Index d{0};
    int parties{0};
    Regime regime{Regime::Global};
    bool lamb{true};
    bool secular_pass{false};
    double min_bohr_gap{0.0};
    std::string uniqueness;
    bool vacuum_dominant{false};
    double max_log_negativity{0.0};
    bool entangled{false};
    double rh_max{0.0};
    std::string error;
};

struct SweepSummary {
    std::vector<SweepRow> rows;
    int machines{0};
    int unique{0};
    int entangled{0};
    int entangled_unique{0};
    int errors{0};
    // First entangled unique case of a non-counterfactual sweep.
    std::optional<MachineSpec> reproducer;
    std::optional<SweepRow> reproducer_row;
};

int worker_count(int requested);

SweepSummary run_sweep(const SweepConfig& cfg);

std::string sweep_csv(const SweepSummary& s);
std::string format_sweep_summary(const SweepSummary& s);

} // namespace qtm
