#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <random>

#include "qtm/model.hpp"
#include "qtm/sweep.hpp"
#include "support.hpp"

using namespace qtm;
using namespace qtm::testing;

namespace {

const char* kSingleMode = R"(
[system]
d = 1
H = [1.0]
partition = [[1]]

[bath.1]
kind = "bosonic"
beta = 2.0
mu = 0.0

[bath.1.spectral]
family = "flat"
strength = 0.02
cutoff = 5.0
)";

std::string with_bath_line(const std::string& key, const std::string& value)
{
    std::string text = kSingleMode;
    const auto pos = text.find("mu = 0.0");
    return text.substr(0, pos) + key + " = " + value + "\n" + text.substr(pos + 9);
}

} // namespace

TEST_SUITE("model") {

TEST_CASE("minimal single-mode file parses")
{
    const MachineSpec m = parse_machine(kSingleMode);
    CHECK(m.d() == 1);
    CHECK(m.network.H(0, 0) == cd(1.0, 0.0));
    REQUIRE(m.network.partition.size() == 1);
    CHECK(m.network.partition[0] == std::vector<Index>{0});
    REQUIRE(m.baths.size() == 1);
    CHECK(m.baths[0].statistics == Statistics::Bosonic);
    CHECK(m.baths[0].J.coupling.rows() == 1);
    CHECK(m.options.regime == Regime::Global);
    CHECK(m.options.lamb);
}

TEST_CASE("indefinite H is rejected")
{
    MachineSpec m = single_mode(1.0, make_bath(Statistics::Spin, 1.0, 0.0, 0.01, 2));
    m.network.H.resize(2, 2);
    m.network.H << 0.0, 1.0, 1.0, 0.0;
    m.network.partition = {{0, 1}};
    m.network.eta = {0, 0};
    CHECK_THROWS_WITH_AS(validate(m), "H not positive definite", ValidationError);
}

TEST_CASE("non-Hermitian H is rejected")
{
    MachineSpec m = two_mode(1.0, 1.2, 0.1, make_bath(Statistics::Spin, 1.0, 0.0, 0.01),
                             make_bath(Statistics::Spin, 1.0, 0.0, 0.01));
    m.network.H(0, 1) = cd(0.1, 0.05);
    CHECK_THROWS_WITH_AS(validate(m), "H not Hermitian", ValidationError);
}

TEST_CASE("spin bath with a chemical potential is rejected")
{
    const std::string text = std::string(kSingleMode).replace(std::string(kSingleMode).find("\"bosonic\""), 9, "\"spin\"");
    const std::string bad = text.substr(0, text.find("mu = 0.0")) + "mu = 0.3" + text.substr(text.find("mu = 0.0") + 8);
    CHECK_THROWS_WITH_AS(parse_machine(bad), "bath 1: spin bath requires mu=0", ValidationError);
}

TEST_CASE("partition invariants")
{
    MachineSpec m = two_mode(1.0, 1.2, 0.1, make_bath(Statistics::Spin, 1.0, 0.0, 0.01),
                             make_bath(Statistics::Spin, 1.0, 0.0, 0.01));
    m.network.partition = {{0}, {0}};
    CHECK_THROWS_WITH_AS(validate(m), "partition sets overlap", ValidationError);
    m.network.partition = {{0}, {2}};
    CHECK_THROWS_WITH_AS(validate(m), "partition references a mode outside 1..d", ValidationError);
    m.network.partition = {{0}};
    m.baths.resize(1);
    CHECK_THROWS_WITH_AS(validate(m), "partition does not cover all modes", ValidationError);
    m.network.partition = {{0, 1}};
    m.baths = {make_bath(Statistics::Spin, 1.0, 0.0, 0.01, 2), make_bath(Statistics::Spin, 1.0, 0.0, 0.01)};
    CHECK_THROWS_WITH_AS(validate(m), "bath count must equal partition count", ValidationError);
}

TEST_CASE("bosonic chemical potential must sit below the spectrum")
{
    MachineSpec m = single_mode(1.0, make_bath(Statistics::Bosonic, 1.0, 1.0, 0.01));
    CHECK_THROWS_WITH_AS(validate(m), "bath 1: mu must be below the minimum eigenfrequency", ValidationError);
    m.baths[0].mu = 0.99;
    CHECK_NOTHROW(validate(m));
}

TEST_CASE("coupling matrix must be PSD and sized to the subsystem")
{
    MachineSpec m = single_mode(1.0, make_bath(Statistics::Bosonic, 1.0, 0.0, 0.01));
    m.baths[0].J.coupling(0, 0) = -1.0;
    CHECK_THROWS_AS(validate(m), ValidationError);
    m.baths[0].J.coupling = Eigen::MatrixXcd::Identity(2, 2);
    CHECK_THROWS_AS(validate(m), ValidationError);
}

TEST_CASE("malformed files raise ParseError")
{
    CHECK_THROWS_AS(parse_machine("[system\nd = 1\n"), ParseError);
    CHECK_THROWS_AS(parse_machine("[system]\nH = [1.0]\npartition = [[1]]\n"), ParseError);
    CHECK_THROWS_AS(parse_machine(with_bath_line("mu", "\"cold\"")), ParseError);
}

TEST_CASE("occupation closed forms")
{
    BathModel spin = make_bath(Statistics::Spin, std::numeric_limits<double>::infinity(), 0.0, 0.01);
    CHECK(occupation(spin, 1.0) == 0.0);
    spin.beta = 0.0;
    CHECK(occupation(spin, 1.0) == doctest::Approx(0.5).epsilon(1e-15));

    BathModel bos = make_bath(Statistics::Bosonic, std::log(2.0), 0.0, 0.01);
    CHECK(occupation(bos, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_THROWS_AS(occupation(bos, 0.0), DomainError);
    CHECK_THROWS_AS(occupation(bos, -1.0), DomainError);
    bos.mu = 0.5;
    CHECK(occupation(bos, 1.0) == doctest::Approx(bose(1.0, std::log(2.0), 0.5)).epsilon(1e-14));
}

TEST_CASE("the Appendix sign fact (1 + xi) p - 1 < 0 holds above max(0, mu)")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 2000; ++k) {
        const bool spin = k % 2;
        BathModel b = make_bath(spin ? Statistics::Spin : Statistics::Bosonic, std::exp(6.0 * u(rng) - 3.0),
                                spin ? 0.0 : 2.0 * u(rng) - 1.0, 0.01);
        const double w = std::max(0.0, b.mu) + 1e-3 + 5.0 * u(rng);
        const double p = occupation(b, w);
        CHECK(p >= 0.0);
        if (spin) CHECK(p < 0.5);
        CHECK((1.0 + b.xi()) * p - 1.0 < 0.0);
    }
}

TEST_CASE("complex number text round trip")
{
    CHECK(parse_complex("1.5-2j") == cd(1.5, -2.0));
    CHECK(parse_complex("-1e-3+4.5e2j") == cd(-1e-3, 450.0));
    CHECK(parse_complex("3") == cd(3.0, 0.0));
    CHECK(parse_complex("-2.5j") == cd(0.0, -2.5));
    const cd z(0.1234567890123456789, -9.87654321e-7);
    CHECK(parse_complex(format_complex(z)) == z);
    CHECK_THROWS_AS(parse_complex("abc"), ParseError);
}

TEST_CASE("save then load is the identity")
{
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        MachineSpec m = random_machine(seed, 1 + static_cast<Index>(seed % 5), 1);
        m.options.regime = seed % 2 ? Regime::Local : Regime::Global;
        m.options.lamb = seed % 3 != 0;
        const MachineSpec r = parse_machine(format_machine(m));
        CHECK(max_abs(r.network.H - m.network.H) == 0.0);
        CHECK(r.network.partition == m.network.partition);
        CHECK(r.network.eta == m.network.eta);
        REQUIRE(r.baths.size() == m.baths.size());
        for (std::size_t n = 0; n < m.baths.size(); ++n) {
            CHECK(r.baths[n].statistics == m.baths[n].statistics);
            CHECK(r.baths[n].beta == m.baths[n].beta);
            CHECK(r.baths[n].mu == m.baths[n].mu);
            CHECK(r.baths[n].tau_b == m.baths[n].tau_b);
            CHECK(r.baths[n].J.profile == m.baths[n].J.profile);
            CHECK(r.baths[n].J.strength == m.baths[n].J.strength);
            CHECK(r.baths[n].J.cutoff == m.baths[n].J.cutoff);
            CHECK(max_abs(r.baths[n].J.coupling - m.baths[n].J.coupling) == 0.0);
        }
        CHECK(r.options.regime == m.options.regime);
        CHECK(r.options.lamb == m.options.lamb);
    }
}

TEST_CASE("file round trip through disk")
{
    const MachineSpec m = dark_mode_machine();
    const auto path = std::filesystem::temp_directory_path() / "qtm_model_roundtrip.toml";
    save_machine(m, path);
    const MachineSpec r = load_machine(path);
    std::filesystem::remove(path);
    CHECK(max_abs(r.baths[0].J.coupling - m.baths[0].J.coupling) == 0.0);
    CHECK_THROWS_AS(load_machine(path), ParseError);
}

TEST_CASE("spectral density shapes")
{
    SpectralDensity j;
    j.profile = Profile::Flat;
    j.strength = 2.0;
    j.cutoff = 3.0;
    CHECK(j.profile_at(-0.1) == 0.0);
    CHECK(j.profile_at(1.0) == 2.0);
    CHECK(j.profile_at(3.5) == 0.0);
    j.profile = Profile::Ohmic;
    CHECK(j.profile_at(3.0) == doctest::Approx(2.0 * std::exp(-1.0)));
    CHECK(j.profile_at(-1.0) == 0.0);
    Eigen::VectorXcd u(2);
    u << cd(1.0, 0.0), cd(0.0, 1.0);
    const SpectralDensity r = SpectralDensity::rank_one(Profile::Flat, 1.0, 1.0, u);
    CHECK(max_abs(r.coupling - u * u.adjoint()) == 0.0);
}

}
