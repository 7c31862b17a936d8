#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "qtm/fockcheck.hpp"
#include "qtm/sweep.hpp"
#include "support.hpp"

using namespace qtm;
using namespace qtm::testing;

namespace {

using Eigen::MatrixXcd;

// Cold two-mode machine: occupations ~1e-3, so small cutoffs suffice.
MachineSpec cold_pair(bool lamb = true)
{
    return two_mode(1.0, 1.3, 0.1, make_bath(Statistics::Bosonic, 6.0, -0.2, 0.04, 1, Profile::Ohmic, 2.0),
                    make_bath(Statistics::Spin, 5.0, 0.0, 0.03, 1, Profile::Flat, 4.0), lamb);
}

Eigen::VectorXcd dense_spectrum(const TruncatedGenerator& g)
{
    return Eigen::ComplexEigenSolver<MatrixXcd>(MatrixXcd(g.L), false).eigenvalues();
}

} // namespace

TEST_SUITE("fockcheck") {

TEST_CASE("generator is trace preserving")
{
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        MachineSpec m = random_machine(seed, 1 + static_cast<Index>(seed % 2), 1 + static_cast<int>(seed % 2));
        m.options.regime = seed % 3 ? Regime::Global : Regime::Local;
        const TruncatedGenerator g = build_generator(decompose(m), 5);
        CHECK(g.trace_residual <= 1e-12);
        CHECK(g.super_dimension() == g.dimension * g.dimension);
    }
}

TEST_CASE("dimension limits")
{
    CHECK_THROWS_AS(build_generator(decompose(random_machine(1, 3, 2)), 3), DimensionError);
    CHECK_THROWS_AS(build_generator(decompose(cold_pair()), 1), DimensionError);
    CHECK_THROWS_AS(build_generator(decompose(cold_pair()), 41), DimensionError);
}

TEST_CASE("closed system: purely imaginary spectrum")
{
    const MachineSpec m = two_mode(1.0, 1.5, 0.2, make_bath(Statistics::Spin, 1.0, 0.0, 0.0),
                                   make_bath(Statistics::Spin, 1.0, 0.0, 0.0), false);
    const TruncatedGenerator g = build_generator(decompose(m), 3);
    const Eigen::VectorXcd ev = dense_spectrum(g);
    CHECK(ev.real().cwiseAbs().maxCoeff() < 1e-12);
    const OracleSteady s = oracle_steady(g);
    CHECK(s.null_dimension > 1);
    CHECK_FALSE(s.warnings.empty());
}

TEST_CASE("single-mode thermal steady state")
{
    const double beta = 2.0;
    const double nbar = bose(1.0, beta);
    const TruncatedGenerator g =
        build_generator(decompose(single_mode(1.0, make_bath(Statistics::Bosonic, beta, 0.0, 0.05))), 30);
    const OracleSteady s = oracle_steady(g);
    REQUIRE(s.solved);
    CHECK(s.null_dimension == 1);
    CHECK(s.spectral_gap > 0.0);
    // Truncated geometric distribution x^k (1 - x) / (1 - x^(c+1)).
    const double x = nbar / (1.0 + nbar);
    const double z = (1.0 - std::pow(x, 31)) / (1.0 - x);
    for (int k = 0; k <= 30; ++k) CHECK(std::abs(s.rho(k, k).real() - std::pow(x, k) / z) < 1e-10);
    CHECK(s.moments.n(0, 0).real() == doctest::Approx(nbar).epsilon(1e-8));
    CHECK(s.moments.leak < 1e-8);
    CHECK(s.sector_coherence < 1e-12);
}

TEST_CASE("coherent decay follows alpha exp((-i w - kappa/2) t)")
{
    const double kappa = 0.1;
    const TruncatedGenerator g = build_generator(
        decompose(single_mode(1.0, make_bath(Statistics::Bosonic, 20.0, 0.0, kappa))), 14);
    Eigen::VectorXcd alpha(1);
    alpha << cd(1.0, 0.0);
    const std::vector<double> times{0.0, 1.0, 3.0, 8.0};
    const OracleTrajectory tr = oracle_moments(g, fock_coherent(g, alpha), times);
    REQUIRE(tr.samples.size() == times.size());
    for (const auto& s : tr.samples) {
        const cd ref = alpha(0) * std::exp(cd(-0.5 * kappa, -1.0) * s.t);
        CHECK(std::abs(s.mean(0) - ref) < 1e-8);
    }
    CHECK(tr.max_leak < 1e-8);
}

TEST_CASE("number state |1> relaxes with the Gaussian rate law")
{
    const double kappa = 0.2;
    const double beta = 1.0;
    const double nbar = bose(1.0, beta);
    const TruncatedGenerator g =
        build_generator(decompose(single_mode(1.0, make_bath(Statistics::Bosonic, beta, 0.0, kappa))), 25);
    const std::vector<double> times{0.5, 2.0, 6.0};
    const OracleTrajectory tr = oracle_moments(g, fock_number_state(g, {1}), times);
    for (const auto& s : tr.samples)
        CHECK(s.n(0, 0).real() == doctest::Approx(nbar + (1.0 - nbar) * std::exp(-kappa * s.t)).epsilon(1e-7));
}

TEST_CASE("two-mode trajectory from vacuum and from a thermal product agrees with the moment solver")
{
    const SecularDecomposition dec = decompose(cold_pair());
    const MomentDynamics dyn = build_moment_dynamics(dec);
    const TruncatedGenerator g = build_generator(dec, 6);
    const std::vector<double> times{1.0, 5.0, 20.0};
    for (int which = 0; which < 2; ++which) {
        const MatrixXcd rho0 = which == 0 ? fock_vacuum(g) : fock_thermal(g, {0.01, 0.02});
        const FockMoments m0 = fock_moments(g, rho0);
        GaussianState s0 = GaussianState::vacuum(2, dyn.data.basis);
        s0.n = m0.n;
        const OracleTrajectory tr = oracle_moments(g, rho0, times);
        for (const auto& s : tr.samples) {
            const GaussianState e = evolve(dyn, s0, s.t);
            CHECK(max_abs(e.n - s.n) < 1e-8);
            CHECK(max_abs(s.beta) < 1e-10);
        }
    }
}

TEST_CASE("number-conserving generators commute with the number superoperator")
{
    const SecularDecomposition dec = decompose(cold_pair());
    const TruncatedGenerator g = build_generator(dec, 4);
    CHECK(number_commutator_norm(g) <= 1e-12);
    const MomentDynamics dyn = build_moment_dynamics(dec);
    const double s = 5.0 * dyn.total_damping();
    const TruncatedGenerator sq = build_generator(inject_squeezing(dyn, s, 0, 1).data, 4);
    CHECK(number_commutator_norm(sq) > 0.1 * s);
}

TEST_CASE("steady state has no coherence between number sectors")
{
    const OracleSteady s = oracle_steady(build_generator(decompose(cold_pair()), 5));
    REQUIRE(s.solved);
    CHECK(s.null_dimension == 1);
    CHECK(s.sector_coherence < 1e-12);
    CHECK(max_abs(s.moments.beta) < 1e-12);
}

TEST_CASE("dark mode: degenerate kernel")
{
    const OracleSteady s = oracle_steady(build_generator(decompose(dark_mode_machine()), 4));
    CHECK(s.null_dimension >= 2);
    CHECK_FALSE(s.warnings.empty());
}

TEST_CASE("initial states and moments")
{
    const TruncatedGenerator g = build_generator(decompose(cold_pair()), 6);
    const FockMoments v = fock_moments(g, fock_vacuum(g));
    CHECK(max_abs(v.n) == 0.0);
    CHECK(v.leak == 0.0);
    const FockMoments n = fock_moments(g, fock_number_state(g, {2, 1}));
    CHECK(n.n(0, 0).real() == doctest::Approx(2.0));
    CHECK(n.n(1, 1).real() == doctest::Approx(1.0));
    const FockMoments t = fock_moments(g, fock_thermal(g, {0.01, 0.0}));
    CHECK(t.n(0, 0).real() == doctest::Approx(0.01).epsilon(1e-6));
    CHECK(truncation_leak(g, fock_number_state(g, {6, 0})) == doctest::Approx(1.0));
}

TEST_CASE("auto cutoff reaches the leak target")
{
    const SecularDecomposition dec = decompose(single_mode(1.0, make_bath(Statistics::Bosonic, 3.0, 0.0, 0.05)));
    const int c = auto_cutoff(generator_data(dec));
    const OracleSteady s = oracle_steady(build_generator(dec, c), 0);
    CHECK(s.moments.leak < 1e-8);
    CHECK(c <= 40);
}

}
