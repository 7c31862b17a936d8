#include <doctest.h>

#include <cmath>
#include <random>

#include "qtm/pipeline.hpp"
#include "qtm/separability.hpp"
#include "qtm/sweep.hpp"
#include "support.hpp"

using namespace qtm;
using namespace qtm::testing;

namespace {

using Eigen::MatrixXd;

CovarianceMatrix from_sigma(const MatrixXd& s)
{
    CovarianceMatrix c;
    c.sigma = s;
    c.mean = Eigen::VectorXd::Zero(s.rows());
    return c;
}

// Two-mode squeezed vacuum in (q1, p1, q2, p2) ordering.
MatrixXd tmsv(double r)
{
    const double c = std::cosh(2.0 * r) / 2.0;
    const double s = std::sinh(2.0 * r) / 2.0;
    MatrixXd m = MatrixXd::Zero(4, 4);
    m(0, 0) = m(1, 1) = m(2, 2) = m(3, 3) = c;
    m(0, 2) = m(2, 0) = s;
    m(1, 3) = m(3, 1) = -s;
    return m;
}

MatrixXd rotation(double theta)
{
    MatrixXd m(2, 2);
    m << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    return m;
}

MatrixXd squeezer(double r)
{
    MatrixXd m = MatrixXd::Zero(2, 2);
    m(0, 0) = std::exp(-r);
    m(1, 1) = std::exp(r);
    return m;
}

// Random local symplectic on each mode.
MatrixXd local_symplectic(Index d, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    MatrixXd s = MatrixXd::Zero(2 * d, 2 * d);
    for (Index k = 0; k < d; ++k) s.block(2 * k, 2 * k, 2, 2) = rotation(3.0 * u(rng)) * squeezer(u(rng)) * rotation(3.0 * u(rng));
    return s;
}

// Random physical state S diag(nu) S^T with a global passive-plus-squeezing S.
MatrixXd random_state(Index d, std::mt19937_64& rng, double squeeze)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    MatrixXd s = MatrixXd::Identity(2 * d, 2 * d);
    for (int layer = 0; layer < 3; ++layer) {
        s = local_symplectic(d, rng) * s;
        // beam splitters on neighbouring modes
        for (Index k = 0; k + 1 < d; ++k) {
            const double t = 3.0 * u(rng);
            MatrixXd b = MatrixXd::Identity(2 * d, 2 * d);
            b.block(2 * k, 2 * k, 2, 2) *= std::cos(t);
            b.block(2 * k + 2, 2 * k + 2, 2, 2) *= std::cos(t);
            b.block(2 * k, 2 * k + 2, 2, 2) = std::sin(t) * MatrixXd::Identity(2, 2);
            b.block(2 * k + 2, 2 * k, 2, 2) = -std::sin(t) * MatrixXd::Identity(2, 2);
            s = b * s;
        }
        for (Index k = 0; k < d; ++k) s.block(2 * k, 0, 2, 2 * d) = squeezer(squeeze * u(rng)) * s.block(2 * k, 0, 2, 2 * d).eval();
    }
    MatrixXd nu = MatrixXd::Zero(2 * d, 2 * d);
    for (Index k = 0; k < d; ++k) nu(2 * k, 2 * k) = nu(2 * k + 1, 2 * k + 1) = 0.5 + u(rng);
    return s * nu * s.transpose();
}

// Closed-form two-mode log-negativity from the symplectic invariants of the
// partially transposed matrix: Delta~ = det A + det B - 2 det C.
double two_mode_log_negativity(const MatrixXd& s)
{
    const double da = s.block(0, 0, 2, 2).determinant();
    const double db = s.block(2, 2, 2, 2).determinant();
    const double dc = s.block(0, 2, 2, 2).determinant();
    const double delta = da + db - 2.0 * dc;
    const double det = s.determinant();
    const double nu = std::sqrt((delta - std::sqrt(delta * delta - 4.0 * det)) / 2.0);
    return std::max(0.0, -std::log2(2.0 * nu));
}

} // namespace

TEST_SUITE("separability") {

TEST_CASE("complex form of vacuum, thermal and squeezed states")
{
    CHECK(max_abs(to_complex_form(CovarianceMatrix::vacuum(3)) - 0.5 * Eigen::MatrixXcd::Identity(6, 6)) < 1e-15);
    const double nbar = 0.7;
    const Eigen::MatrixXcd t = to_complex_form(from_sigma((nbar + 0.5) * MatrixXd::Identity(2, 2)));
    CHECK(max_abs(t - (nbar + 0.5) * Eigen::MatrixXcd::Identity(2, 2)) < 1e-15);
    const double r = 0.4;
    MatrixXd sq = MatrixXd::Zero(2, 2);
    sq(0, 0) = std::exp(2.0 * r) / 2.0;
    sq(1, 1) = std::exp(-2.0 * r) / 2.0;
    const Eigen::MatrixXcd v = to_complex_form(from_sigma(sq));
    CHECK(std::abs(v(0, 1)) == doctest::Approx(std::sinh(2.0 * r) / 2.0).epsilon(1e-14));
    CHECK(v(0, 0).real() == doctest::Approx(std::cosh(2.0 * r) / 2.0).epsilon(1e-14));
    const CovarianceMatrix back = from_complex_form(v, Eigen::VectorXcd::Zero(1));
    CHECK((back.sigma - sq).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("physicality and vacuum dominance")
{
    CHECK(is_physical(CovarianceMatrix::vacuum(2)));
    CHECK(vacuum_dominance(CovarianceMatrix::vacuum(2)));
    CHECK_FALSE(is_physical(from_sigma(0.25 * MatrixXd::Identity(2, 2))));
    CHECK(is_physical(from_sigma(tmsv(1.0))));
    CHECK_FALSE(vacuum_dominance(from_sigma(tmsv(1.0))));
    CHECK(vacuum_margin(CovarianceMatrix::vacuum(1)) == doctest::Approx(0.0));
    CHECK(uncertainty_margin(CovarianceMatrix::vacuum(1)) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK_THROWS_AS(log_negativity(from_sigma(0.25 * MatrixXd::Identity(4, 4)), {1}), DomainError);
}

TEST_CASE("symplectic spectrum is invariant under symplectic maps")
{
    std::mt19937_64 rng(5);
    const MatrixXd s = random_state(3, rng, 0.5);
    const MatrixXd l = local_symplectic(3, rng);
    const MatrixXd om = symplectic_form(3);
    CHECK((l * om * l.transpose() - om).cwiseAbs().maxCoeff() < 1e-12);
    const Eigen::VectorXd a = symplectic_eigenvalues(s);
    const Eigen::VectorXd b = symplectic_eigenvalues(l * s * l.transpose());
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(a.minCoeff() >= 0.5 - 1e-12);
}

TEST_CASE("vacuum and product states carry no log-negativity")
{
    CHECK(log_negativity(CovarianceMatrix::vacuum(4), {2, 3}) <= 1e-12);
    CHECK(log_negativity(from_sigma(tmsv(0.0)), {1}) <= 1e-12);
    std::mt19937_64 rng(6);
    MatrixXd prod = MatrixXd::Zero(4, 4);
    prod.block(0, 0, 2, 2) = random_state(1, rng, 1.0);
    prod.block(2, 2, 2, 2) = random_state(1, rng, 1.0);
    CHECK(log_negativity(from_sigma(prod), {1}) <= 1e-12);
}

TEST_CASE("two-mode squeezed vacuum: E_N = 2r/ln2")
{
    for (double r : {0.1, 0.5, 1.3}) {
        const double en = log_negativity(from_sigma(tmsv(r)), {1});
        CHECK(en == doctest::Approx(2.0 * r / std::log(2.0)).epsilon(1e-12));
        CHECK(en == doctest::Approx(two_mode_log_negativity(tmsv(r))).epsilon(1e-12));
    }
}

TEST_CASE("random two-mode states against the symplectic-invariant closed form")
{
    std::mt19937_64 rng(8);
    int entangled = 0;
    for (int k = 0; k < 200; ++k) {
        const MatrixXd s = random_state(2, rng, 0.8);
        const double en = log_negativity(from_sigma(s), {1});
        CHECK(en == doctest::Approx(two_mode_log_negativity(s)).epsilon(1e-9).scale(1.0));
        if (en > 0.0) ++entangled;
    }
    CHECK(entangled > 10);
}

TEST_CASE("log-negativity is invariant under local symplectic maps and side exchange")
{
    std::mt19937_64 rng(9);
    for (int k = 0; k < 30; ++k) {
        const MatrixXd s = random_state(3, rng, 0.6);
        const MatrixXd l = local_symplectic(3, rng);
        const CovarianceMatrix a = from_sigma(s);
        const CovarianceMatrix b = from_sigma(l * s * l.transpose());
        CHECK(log_negativity(a, {2}) == doctest::Approx(log_negativity(b, {2})).epsilon(1e-9).scale(1.0));
        CHECK(log_negativity(a, {2}) == doctest::Approx(log_negativity(a, {0, 1})).epsilon(1e-9).scale(1.0));
    }
}

TEST_CASE("bipartition enumeration")
{
    const std::vector<std::vector<Index>> three{{0}, {1, 2}, {3}};
    const auto splits = bipartitions(three);
    // {0 | 12 3}, {1 | 0 3} , {3 | 0 1}: contiguous splits coincide with these.
    CHECK(splits.size() == 3);
    for (const auto& s : splits) {
        CHECK(s.parties_a.front() == 0);
        CHECK(s.modes_a.size() + s.modes_b.size() == 4);
    }
    const std::vector<std::vector<Index>> four{{0}, {1}, {2}, {3}};
    CHECK(bipartitions(four).size() == 5);
    CHECK(bipartitions(four, true).size() == 7);
    CHECK(bipartitions({{0, 1}}).empty());
}

TEST_CASE("separability verdicts")
{
    SeparabilityReport vac = analyze_separability(CovarianceMatrix::vacuum(2), {{0}, {1}});
    CHECK(vac.physical);
    CHECK(vac.vacuum_dominant);
    CHECK(vac.unsqueezed);
    REQUIRE(vac.entries.size() == 1);
    CHECK(vac.entries[0].verdict == Verdict::Separable);
    CHECK_FALSE(vac.any_entangled());

    const SeparabilityReport sq = analyze_separability(from_sigma(tmsv(0.5)), {{0}, {1}});
    CHECK_FALSE(sq.vacuum_dominant);
    CHECK_FALSE(sq.unsqueezed);
    CHECK(sq.entries[0].verdict == Verdict::Entangled);
    CHECK(sq.any_entangled());

    // A single party is split into its modes.
    const SeparabilityReport one = analyze_separability(from_sigma(tmsv(0.5)), {{0, 1}});
    REQUIRE(one.entries.size() == 1);
    CHECK(one.entries[0].verdict == Verdict::Entangled);

    // Locally squeezed product: not vacuum dominant, PPT, 1 x 1 -> separable.
    MatrixXd prod = MatrixXd::Identity(4, 4) * 0.5;
    prod(0, 0) = std::exp(1.0) / 2.0;
    prod(1, 1) = std::exp(-1.0) / 2.0;
    const SeparabilityReport p = analyze_separability(from_sigma(prod), {{0}, {1}});
    CHECK_FALSE(p.vacuum_dominant);
    CHECK(p.entries[0].verdict == Verdict::Separable);

    const SeparabilityReport bad = analyze_separability(from_sigma(0.25 * MatrixXd::Identity(4, 4)), {{0}, {1}});
    CHECK_FALSE(bad.physical);
    CHECK(bad.entries.empty());
    CHECK(format_csv(sq).find("entangled") != std::string::npos);
}

TEST_CASE("covariance of a physical Gaussian state")
{
    GaussianState s = GaussianState::vacuum(2, Basis::Physical);
    s.n(0, 0) = 0.3;
    s.mean(1) = cd(1.0, -2.0);
    s.n(1, 1) = std::norm(s.mean(1));
    const CovarianceMatrix c = covariance_from_state(s);
    CHECK(c.sigma(0, 0) == doctest::Approx(0.8));
    CHECK(c.sigma(1, 1) == doctest::Approx(0.8));
    CHECK(c.sigma(2, 2) == doctest::Approx(0.5));
    CHECK(c.mean(2) == doctest::Approx(std::sqrt(2.0)));
    CHECK(c.mean(3) == doctest::Approx(-2.0 * std::sqrt(2.0)));
}

TEST_CASE("machine steady states are physical and vacuum dominant")
{
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        MachineSpec m = random_machine(seed, 2 + static_cast<Index>(seed % 4), 2 + static_cast<Index>(seed % 2));
        m.options.regime = seed % 2 ? Regime::Global : Regime::Local;
        const PipelineResult r = run_pipeline(m, {});
        if (!r.cov) continue;
        CHECK(r.separability->physical);
        CHECK(r.separability->vacuum_dominant);
        CHECK(r.separability->unsqueezed);
        CHECK(r.max_log_negativity() <= 1e-10);
    }
}

}
