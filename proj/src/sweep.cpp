// sweep.cpp - Random machines and the theorem sweep

#include "qtm/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "qtm/linalg.hpp"

namespace qtm {

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

double log_uniform(std::mt19937_64& rng, double lo, double hi)
{
    return std::exp(uniform(rng, std::log(lo), std::log(hi)));
}

Eigen::VectorXcd random_unit_vector(Index n, std::mt19937_64& rng)
{
    std::normal_distribution<double> g;
    Eigen::VectorXcd u(n);
    for (Index k = 0; k < n; ++k) u(k) = cd(g(rng), g(rng));
    return u / u.norm();
}

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

} // namespace

void SweepConfig::validate() const
{
    if (count < 0) throw ValidationError("sweep count must be >= 0");
    if (d_min < 1 || d_max < d_min) throw ValidationError("empty mode-count range");
    if (parties_min < 1 || parties_max < parties_min) throw ValidationError("empty party-count range");
    if (parties_min > d_max) throw ValidationError("party count exceeds every mode count");
    if (regimes.empty() || lamb.empty()) throw ValidationError("empty regime or Lamb-shift set");
    if (!(ensemble.t_lo > 0.0) || ensemble.t_hi < ensemble.t_lo) throw ValidationError("empty temperature range");
    if (!(ensemble.omega_min_lo > 0.0) || ensemble.omega_min_hi < ensemble.omega_min_lo)
        throw ValidationError("empty frequency range");
}

std::uint64_t item_seed(std::uint64_t seed, std::uint64_t index)
{
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

MachineSpec random_machine(std::uint64_t seed, Index d, int parties, const EnsembleParams& p)
{
    if (parties < 1 || d < parties) throw ValidationError("random machine requires d >= N >= 1");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;

    MachineSpec spec;
    Eigen::MatrixXcd x(d, d);
    for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j) x(i, j) = cd(g(rng), g(rng));
    Eigen::MatrixXcd h = p.gue_scale * (x + x.adjoint()) / (2.0 * std::sqrt(static_cast<double>(d)));
    const double omega_min = uniform(rng, p.omega_min_lo, p.omega_min_hi);
    h += (omega_min - linalg::min_eigenvalue(h)) * Eigen::MatrixXcd::Identity(d, d);
    spec.network.H = linalg::hermitian_part(h);
    const double omega_max = linalg::max_eigenvalue(spec.network.H);

    std::vector<Index> modes(static_cast<std::size_t>(d));
    std::iota(modes.begin(), modes.end(), 0);
    std::shuffle(modes.begin(), modes.end(), rng);
    std::vector<Index> cuts(static_cast<std::size_t>(d - 1));
    std::iota(cuts.begin(), cuts.end(), 1);
    std::shuffle(cuts.begin(), cuts.end(), rng);
    cuts.resize(static_cast<std::size_t>(parties - 1));
    cuts.push_back(0);
    cuts.push_back(d);
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        std::vector<Index> part(modes.begin() + cuts[k], modes.begin() + cuts[k + 1]);
        std::sort(part.begin(), part.end());
        spec.network.partition.push_back(std::move(part));
    }
    spec.network.eta.resize(static_cast<std::size_t>(d));
    for (auto& e : spec.network.eta) e = static_cast<int>(rng() & 1u);

    for (const auto& part : spec.network.partition) {
        BathModel b;
        b.statistics = (rng() & 1u) ? Statistics::Spin : Statistics::Bosonic;
        b.beta = 1.0 / log_uniform(rng, p.t_lo, p.t_hi);
        b.mu = b.statistics == Statistics::Spin ? 0.0 : omega_min * (1.0 - uniform(rng, 0.1, 1.5));
        const Profile profile = (rng() & 1u) ? Profile::Ohmic : Profile::Flat;
        const double cutoff = profile == Profile::Flat ? uniform(rng, 1.5, 3.0) * omega_max
                                                       : uniform(rng, 0.5, 2.0) * omega_max;
        const double kappa = uniform(rng, 0.2, 1.0) * p.kappa_max * omega_min;
        b.J = SpectralDensity::rank_one(profile, kappa, cutoff,
                                        random_unit_vector(static_cast<Index>(part.size()), rng));
        b.tau_b = 1.0 / cutoff;
        spec.baths.push_back(std::move(b));
    }
    validate(spec);
    return spec;
}

int worker_count(int requested)
{
    if (requested > 0) return requested;
    if (const char* env = std::getenv("QTM_WORKERS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

SweepSummary run_sweep(const SweepConfig& cfg)
{
    cfg.validate();
    struct Item {
        std::vector<SweepRow> rows;
        std::optional<MachineSpec> entangled_spec;
        std::optional<SweepRow> entangled_row;
    };
    std::vector<Item> items(static_cast<std::size_t>(cfg.count));

    auto run_item = [&](int index) {
        Item& item = items[static_cast<std::size_t>(index)];
        const std::uint64_t seed = item_seed(cfg.seed, static_cast<std::uint64_t>(index));
        std::mt19937_64 rng(seed);
        const int parties = std::uniform_int_distribution<int>(
            cfg.parties_min, static_cast<int>(std::min<Index>(cfg.parties_max, cfg.d_max)))(rng);
        const Index d = std::uniform_int_distribution<Index>(std::max<Index>(cfg.d_min, parties), cfg.d_max)(rng);
        MachineSpec base;
        std::string base_error;
        try {
            base = random_machine(rng(), d, parties, cfg.ensemble);
        } catch (const std::exception& e) {
            base_error = e.what();
        }
        for (Regime regime : cfg.regimes) {
            for (bool lamb : cfg.lamb) {
                SweepRow row;
                row.index = index;
                row.seed = seed;
                row.d = d;
                row.parties = parties;
                row.regime = regime;
                row.lamb = lamb;
                row.error = base_error;
                if (base_error.empty()) {
                    MachineSpec spec = base;
                    spec.options.regime = regime;
                    spec.options.lamb = lamb;
                    try {
                        PipelineOptions opts;
                        opts.all_bipartitions = cfg.all_bipartitions;
                        opts.counterfactual_squeeze = cfg.counterfactual;
                        const PipelineResult r = run_pipeline(spec, opts);
                        row.secular_pass = r.gap.pass;
                        row.min_bohr_gap = r.gap.min_gap;
                        row.uniqueness = to_string(r.steady.report.status);
                        row.rh_max = r.rh.max_eigenvalue;
                        if (r.separability) {
                            row.vacuum_dominant = r.separability->vacuum_dominant;
                            row.max_log_negativity = r.max_log_negativity();
                            row.entangled = r.separability->any_entangled();
                        }
                        if (row.entangled && r.steady.report.unique() && !cfg.counterfactual && !item.entangled_spec) {
                            item.entangled_spec = spec;
                            item.entangled_row = row;
                        }
                    } catch (const std::exception& e) {
                        row.error = e.what();
                    }
                }
                item.rows.push_back(std::move(row));
            }
        }
    };

    const int workers = std::min(worker_count(cfg.workers), std::max(1, cfg.count));
    std::atomic<int> next{0};
    auto work = [&] {
        for (int i = next++; i < cfg.count; i = next++) run_item(i);
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    SweepSummary s;
    s.machines = cfg.count;
    for (auto& item : items) {
        for (auto& row : item.rows) {
            const bool unique = row.uniqueness == to_string(UniquenessReport::Status::Unique);
            s.unique += unique;
            s.entangled += row.entangled;
            s.entangled_unique += row.entangled && unique;
            s.errors += !row.error.empty();
            s.rows.push_back(std::move(row));
        }
        if (item.entangled_spec && !s.reproducer) {
            s.reproducer = std::move(item.entangled_spec);
            s.reproducer_row = std::move(item.entangled_row);
        }
    }
    return s;
}

std::string sweep_csv(const SweepSummary& s)
{
    std::ostringstream os;
    os.precision(12);
    os << "index,seed,d,parties,regime,lamb,secular,min_bohr_gap,uniqueness,vacuum_dominant,"
          "max_log_negativity,entangled,rh_max,error\n";
    for (const auto& r : s.rows) {
        os << r.index << "," << r.seed << "," << r.d << "," << r.parties << "," << to_string(r.regime) << ","
           << (r.lamb ? "on" : "off") << "," << (r.secular_pass ? "PASS" : "WARN") << "," << r.min_bohr_gap << ","
           << r.uniqueness << "," << (r.vacuum_dominant ? "true" : "false") << "," << r.max_log_negativity << ","
           << (r.entangled ? "true" : "false") << "," << r.rh_max << "," << csv_field(r.error) << "\n";
    }
    return os.str();
}

std::string format_sweep_summary(const SweepSummary& s)
{
    std::ostringstream os;
    os << "machines: " << s.machines << "\n"
       << "runs: " << s.rows.size() << "\n"
       << "unique: " << s.unique << "\n"
       << "entangled: " << s.entangled << "\n"
       << "entangled_unique: " << s.entangled_unique << "\n"
       << "errors: " << s.errors << "\n";
    return os.str();
}

} // namespace qtm
