// fockcheck.cpp - Truncated Fock-space Liouvillian

#include "qtm/fockcheck.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <utility>

#include <Eigen/IterativeLinearSolvers>
#include <boost/numeric/odeint.hpp>
#include <unsupported/Eigen/KroneckerProduct>

#include "qtm/linalg.hpp"

namespace qtm {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

namespace {

constexpr int kMaxCutoff = 40;
constexpr Index kMaxSuperDimension = 4'000'000;
constexpr Index kDirectLimit = 40'000;

SparseC identity(Index n)
{
    SparseC i(n, n);
    i.setIdentity();
    return i;
}

SparseC annihilator(int cutoff)
{
    const Index n = cutoff + 1;
    SparseC a(n, n);
    std::vector<Eigen::Triplet<cd>> t;
    for (Index k = 1; k < n; ++k) t.emplace_back(k - 1, k, std::sqrt(static_cast<double>(k)));
    a.setFromTriplets(t.begin(), t.end());
    return a;
}

SparseC kron(const SparseC& a, const SparseC& b)
{
    return Eigen::kroneckerProduct(a, b).eval();
}

SparseC adjoint(const SparseC& a)
{
    return SparseC(a.adjoint());
}

SparseC transpose(const SparseC& a)
{
    return SparseC(a.transpose());
}

// Superoperator of rho -> L rho L^dag - {L^dag L, rho}/2.
SparseC dissipator(const SparseC& l)
{
    const Index n = l.rows();
    const SparseC id = identity(n);
    const SparseC ldl = adjoint(l) * l;
    SparseC out = kron(SparseC(l.conjugate()), l);
    out -= 0.5 * kron(id, ldl);
    out -= 0.5 * kron(transpose(ldl), id);
    return out;
}

void add_jumps(SparseC& L, const MatrixXcd& rates, const std::vector<SparseC>& ops)
{
    if (rates.cwiseAbs().maxCoeff() == 0.0) return;
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(linalg::hermitian_part(rates));
    const Index d = rates.rows();
    const Index n = ops.front().rows();
    for (Index k = 0; k < d; ++k) {
        const double g = es.eigenvalues()(k);
        if (g <= 0.0) continue;
        SparseC jump(n, n);
        for (Index u = 0; u < d; ++u) jump += es.eigenvectors()(u, k) * ops[static_cast<std::size_t>(u)];
        L += dissipator(std::sqrt(g) * jump);
    }
}

Eigen::Map<const VectorXcd> as_vector(const MatrixXcd& rho)
{
    return {rho.data(), rho.size()};
}

MatrixXcd as_matrix(const VectorXcd& v, Index dim)
{
    return Eigen::Map<const MatrixXcd>(v.data(), dim, dim);
}

// Occupation of mode m in basis state k.
int occupation_of(const TruncatedGenerator& g, Index k, Index m)
{
    const Index base = g.cutoff + 1;
    return static_cast<int>(m == 0 && g.modes == 2 ? k / base : k % base);
}

MatrixXcd single_mode_thermal(int cutoff, double nbar)
{
    MatrixXcd r = MatrixXcd::Zero(cutoff + 1, cutoff + 1);
    const double q = nbar / (1.0 + nbar);
    double total = 0.0;
    for (int k = 0; k <= cutoff; ++k) {
        const double w = std::pow(q, k);
        r(k, k) = w;
        total += w;
    }
    return r / total;
}

VectorXcd single_mode_coherent(int cutoff, cd alpha)
{
    VectorXcd psi(cutoff + 1);
    psi(0) = 1.0;
    for (int k = 1; k <= cutoff; ++k) psi(k) = psi(k - 1) * alpha / std::sqrt(static_cast<double>(k));
    return psi / psi.norm();
}

MatrixXcd kron_dense(const MatrixXcd& a, const MatrixXcd& b)
{
    return linalg::kron(a, b);
}

} // namespace

TruncatedGenerator build_generator(const GeneratorData& data, int cutoff)
{
    const Index d = data.d();
    if (d < 1 || d > 2) throw DimensionError("Fock oracle supports one or two modes (got " + std::to_string(d) + ")");
    if (cutoff < 2) throw DimensionError("Fock cutoff must be >= 2");
    if (cutoff > kMaxCutoff) throw DimensionError("Fock cutoff above " + std::to_string(kMaxCutoff));
    Index dim = 1;
    for (Index m = 0; m < d; ++m) dim *= cutoff + 1;
    if (dim * dim > kMaxSuperDimension) throw DimensionError("Fock superoperator too large");

    TruncatedGenerator g;
    g.cutoff = cutoff;
    g.modes = d;
    g.dimension = dim;
    g.data = data;
    const SparseC a = annihilator(cutoff);
    const SparseC id1 = identity(cutoff + 1);
    if (d == 1) {
        g.b = {a};
    } else {
        g.b = {kron(a, id1), kron(id1, a)};
    }
    std::vector<SparseC> bd;
    for (const auto& op : g.b) bd.push_back(adjoint(op));

    SparseC H(dim, dim);
    g.number = SparseC(dim, dim);
    for (Index u = 0; u < d; ++u) {
        g.number += bd[static_cast<std::size_t>(u)] * g.b[static_cast<std::size_t>(u)];
        for (Index v = 0; v < d; ++v) {
            const auto su = static_cast<std::size_t>(u);
            const auto sv = static_cast<std::size_t>(v);
            if (data.h(u, v) != 0.0) H += data.h(u, v) * (bd[su] * g.b[sv]);
            if (data.pairing.size() && data.pairing(u, v) != 0.0) {
                const SparseC up = bd[su] * bd[sv];
                H += (0.5 * data.pairing(u, v)) * up;
                H += (0.5 * std::conj(data.pairing(u, v))) * adjoint(up);
            }
        }
    }
    const SparseC id = identity(dim);
    const cd i(0.0, 1.0);
    g.L = -i * (kron(id, H) - kron(transpose(H), id));
    add_jumps(g.L, data.gamma1, bd);
    add_jumps(g.L, data.gamma2, g.b);
    g.L.prune(cd(0.0, 0.0));
    g.L.makeCompressed();

    // Trace preservation: vec(I)^dag L = 0.
    VectorXcd vid = as_vector(MatrixXcd::Identity(dim, dim));
    const VectorXcd left = g.L.adjoint() * vid;
    g.trace_residual = left.cwiseAbs().maxCoeff();
    return g;
}

TruncatedGenerator build_generator(const SecularDecomposition& dec, int cutoff)
{
    return build_generator(generator_data(dec), cutoff);
}

double number_commutator_norm(const TruncatedGenerator& gen)
{
    const SparseC id = identity(gen.dimension);
    const SparseC nsup = kron(id, gen.number) - kron(transpose(gen.number), id);
    const SparseC c = gen.L * nsup - nsup * gen.L;
    return c.norm();
}

double truncation_leak(const TruncatedGenerator& gen, const MatrixXcd& rho)
{
    double leak = 0.0;
    for (Index k = 0; k < gen.dimension; ++k) {
        bool edge = false;
        for (Index m = 0; m < gen.modes; ++m) edge = edge || occupation_of(gen, k, m) == gen.cutoff;
        if (edge) leak += rho(k, k).real();
    }
    return std::abs(leak);
}

FockMoments fock_moments(const TruncatedGenerator& gen, const MatrixXcd& rho)
{
    const Index d = gen.modes;
    FockMoments m;
    m.mean = VectorXcd::Zero(d);
    m.n = MatrixXcd::Zero(d, d);
    m.beta = MatrixXcd::Zero(d, d);
    auto expect = [&](const SparseC& op) { return (op * rho).trace(); };
    for (Index j = 0; j < d; ++j) m.mean(j) = expect(gen.b[static_cast<std::size_t>(j)]);
    for (Index j = 0; j < d; ++j) {
        for (Index k = 0; k < d; ++k) {
            const auto& bj = gen.b[static_cast<std::size_t>(j)];
            const auto& bk = gen.b[static_cast<std::size_t>(k)];
            m.n(j, k) = expect(SparseC(adjoint(bj) * bk));
            m.beta(j, k) = expect(SparseC(bj * bk)) - m.mean(j) * m.mean(k);
        }
    }
    m.leak = truncation_leak(gen, rho);
    return m;
}

MatrixXcd fock_vacuum(const TruncatedGenerator& gen)
{
    return fock_number_state(gen, std::vector<int>(static_cast<std::size_t>(gen.modes), 0));
}

MatrixXcd fock_number_state(const TruncatedGenerator& gen, const std::vector<int>& occ)
{
    if (static_cast<Index>(occ.size()) != gen.modes) throw std::invalid_argument("fock_number_state: size mismatch");
    Index k = 0;
    for (int n : occ) {
        if (n < 0 || n > gen.cutoff) throw DomainError("number state outside the truncated space");
        k = k * (gen.cutoff + 1) + n;
    }
    MatrixXcd rho = MatrixXcd::Zero(gen.dimension, gen.dimension);
    rho(k, k) = 1.0;
    return rho;
}

MatrixXcd fock_coherent(const TruncatedGenerator& gen, const VectorXcd& alpha)
{
    if (alpha.size() != gen.modes) throw std::invalid_argument("fock_coherent: size mismatch");
    VectorXcd psi = single_mode_coherent(gen.cutoff, alpha(0));
    if (gen.modes == 2) psi = kron_dense(psi, single_mode_coherent(gen.cutoff, alpha(1)));
    return psi * psi.adjoint();
}

MatrixXcd fock_thermal(const TruncatedGenerator& gen, const std::vector<double>& nbar)
{
    if (static_cast<Index>(nbar.size()) != gen.modes) throw std::invalid_argument("fock_thermal: size mismatch");
    MatrixXcd rho = single_mode_thermal(gen.cutoff, nbar[0]);
    if (gen.modes == 2) rho = kron_dense(rho, single_mode_thermal(gen.cutoff, nbar[1]));
    return rho;
}

OracleTrajectory oracle_moments(const TruncatedGenerator& gen, const MatrixXcd& rho0, const std::vector<double>& times)
{
    namespace ode = boost::numeric::odeint;
    if (rho0.rows() != gen.dimension || rho0.cols() != gen.dimension) {
        throw std::invalid_argument("oracle_moments: initial state has the wrong dimension");
    }
    if (std::abs(rho0.trace() - 1.0) > 1e-10) throw DomainError("initial state is not normalized");
    if (!std::is_sorted(times.begin(), times.end()) || (!times.empty() && times.front() < 0.0)) {
        throw DomainError("sample times must be non-negative and ascending");
    }

    // Real form of the complex linear system: y = (Re v, Im v).
    const Index n = gen.super_dimension();
    Eigen::SparseMatrix<double> re(gen.L.real()), im(gen.L.imag());
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(4 * gen.L.nonZeros()));
    auto put = [&](const Eigen::SparseMatrix<double>& m, Index r0, Index c0, double sign) {
        for (Index c = 0; c < m.outerSize(); ++c)
            for (Eigen::SparseMatrix<double>::InnerIterator it(m, c); it; ++it)
                if (it.value() != 0.0) trip.emplace_back(r0 + it.row(), c0 + it.col(), sign * it.value());
    };
    put(re, 0, 0, 1.0);
    put(im, 0, n, -1.0);
    put(im, n, 0, 1.0);
    put(re, n, n, 1.0);
    Eigen::SparseMatrix<double> big(2 * n, 2 * n);
    big.setFromTriplets(trip.begin(), trip.end());
    big.makeCompressed();

    using State = std::vector<double>;
    State y(static_cast<std::size_t>(2 * n));
    const auto v0 = as_vector(rho0);
    for (Index k = 0; k < n; ++k) {
        y[static_cast<std::size_t>(k)] = v0(k).real();
        y[static_cast<std::size_t>(n + k)] = v0(k).imag();
    }
    auto rhs = [&](const State& x, State& dx, double) {
        Eigen::Map<const Eigen::VectorXd> xm(x.data(), 2 * n);
        Eigen::Map<Eigen::VectorXd> dm(dx.data(), 2 * n);
        dm.noalias() = big * xm;
    };

    OracleTrajectory out;
    // rho0 is the state at t = 0; an inserted t = 0 is not reported.
    std::vector<double> ts = times;
    const bool skip_first = !ts.empty() && ts.front() > 0.0;
    if (skip_first) ts.insert(ts.begin(), 0.0);
    bool skipped = !skip_first;
    auto record = [&](const State& x, double t) {
        if (!skipped) {
            skipped = true;
            return;
        }
        VectorXcd v(n);
        for (Index k = 0; k < n; ++k) v(k) = cd(x[static_cast<std::size_t>(k)], x[static_cast<std::size_t>(n + k)]);
        FockMoments m = fock_moments(gen, as_matrix(v, gen.dimension));
        m.t = t;
        out.max_leak = std::max(out.max_leak, m.leak);
        out.samples.push_back(std::move(m));
    };
    if (times.empty()) return out;
    auto stepper = ode::make_controlled(1e-12, 1e-10, ode::runge_kutta_fehlberg78<State>());
    ode::integrate_times(stepper, rhs, y, ts.begin(), ts.end(), 1e-3, record);
    if (out.max_leak > 1e-8) {
        out.warnings.push_back("truncation leak " + std::to_string(out.max_leak) + " exceeds 1e-8; raise the cutoff");
    }
    return out;
}

namespace {

// Spectrum of a sparse matrix from the dense spectra of its irreducible
// blocks (connected components of the sparsity graph). Number-conserving
// generators split by the bra-ket excitation difference.
Eigen::VectorXcd block_spectrum(const SparseC& m)
{
    const Index n = m.rows();
    std::vector<Index> parent(static_cast<std::size_t>(n));
    std::iota(parent.begin(), parent.end(), Index{0});
    auto find = [&](Index x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    };
    for (Index c = 0; c < m.outerSize(); ++c)
        for (SparseC::InnerIterator it(m, c); it; ++it)
            if (it.value() != cd(0.0, 0.0)) parent[static_cast<std::size_t>(find(it.row()))] = find(c);
    std::map<Index, std::vector<Index>> blocks;
    for (Index k = 0; k < n; ++k) blocks[find(k)].push_back(k);

    Eigen::VectorXcd ev(n);
    Index filled = 0;
    std::vector<Index> local(static_cast<std::size_t>(n));
    for (const auto& [root, idx] : blocks) {
        const Index b = static_cast<Index>(idx.size());
        for (Index k = 0; k < b; ++k) local[static_cast<std::size_t>(idx[static_cast<std::size_t>(k)])] = k;
        MatrixXcd dense = MatrixXcd::Zero(b, b);
        for (Index k = 0; k < b; ++k) {
            const Index c = idx[static_cast<std::size_t>(k)];
            for (SparseC::InnerIterator it(m, c); it; ++it) dense(local[static_cast<std::size_t>(it.row())], k) = it.value();
        }
        if (b == 1) {
            ev(filled++) = dense(0, 0);
            continue;
        }
        ev.segment(filled, b) = Eigen::ComplexEigenSolver<MatrixXcd>(dense, false).eigenvalues();
        filled += b;
    }
    return ev;
}

} // namespace

OracleSteady oracle_steady(const TruncatedGenerator& gen, Index dense_limit)
{
    OracleSteady out;
    const Index n = gen.super_dimension();
    const Index dim = gen.dimension;

    // Replace the first equation by the trace constraint.
    std::vector<Eigen::Triplet<cd>> trip;
    trip.reserve(static_cast<std::size_t>(gen.L.nonZeros() + dim));
    for (Index c = 0; c < gen.L.outerSize(); ++c)
        for (SparseC::InnerIterator it(gen.L, c); it; ++it)
            if (it.row() != 0) trip.emplace_back(it.row(), it.col(), it.value());
    for (Index k = 0; k < dim; ++k) trip.emplace_back(0, k * dim + k, 1.0);
    SparseC a(n, n);
    a.setFromTriplets(trip.begin(), trip.end());
    a.makeCompressed();
    VectorXcd rhs = VectorXcd::Zero(n);
    rhs(0) = 1.0;

    // Preconditioned BiCGSTAB; sparse LU when it stalls on a small system.
    auto accept = [&](const VectorXcd& v) {
        if (!v.allFinite()) return false;
        const double residual = (gen.L * v).cwiseAbs().maxCoeff();
        if (!(residual < 1e-10 * std::max(1.0, gen.L.coeffs().cwiseAbs().maxCoeff()))) return false;
        out.rho = linalg::hermitian_part(as_matrix(v, dim));
        out.solved = true;
        return true;
    };
    // A cheap incomplete factorization first (the factorization dominates the
    // cost at large cutoffs), then a tighter one.
    for (const auto& [droptol, fill] : {std::pair{1e-2, 5}, std::pair{1e-8, 20}}) {
        if (out.solved) break;
        Eigen::BiCGSTAB<SparseC, Eigen::IncompleteLUT<cd>> it;
        it.preconditioner().setDroptol(droptol);
        it.preconditioner().setFillfactor(fill);
        it.setTolerance(1e-14);
        it.setMaxIterations(500);
        it.compute(a);
        if (it.info() == Eigen::Success) accept(it.solve(rhs));
    }
    if (!out.solved && n <= kDirectLimit) {
        Eigen::SparseLU<SparseC> lu;
        lu.compute(a);
        if (lu.info() == Eigen::Success) accept(lu.solve(rhs));
    }
    if (!out.solved) out.warnings.push_back("steady state not unique (trace-constrained generator is singular)");

    if (n <= dense_limit) {
        const Eigen::VectorXcd ev = block_spectrum(gen.L);
        const double scale = std::max(1.0, gen.L.coeffs().cwiseAbs().maxCoeff());
        out.null_dimension = 0;
        out.spectral_gap = std::numeric_limits<double>::infinity();
        for (Index k = 0; k < ev.size(); ++k) {
            if (std::abs(ev(k)) <= 1e-9 * scale) {
                ++out.null_dimension;
            } else {
                out.spectral_gap = std::min(out.spectral_gap, -ev(k).real());
            }
        }
        if (out.null_dimension > 1) {
            out.solved = false;
            out.warnings.push_back("null space of dimension " + std::to_string(out.null_dimension));
        }
    }

    if (out.solved) {
        out.moments = fock_moments(gen, out.rho);
        if (out.moments.leak > 1e-8) {
            out.warnings.push_back("truncation leak " + std::to_string(out.moments.leak) + " exceeds 1e-8");
        }
        const Eigen::VectorXcd diag = MatrixXcd(gen.number).diagonal();
        for (Index i = 0; i < dim; ++i)
            for (Index j = 0; j < dim; ++j)
                if (std::abs(diag(i) - diag(j)) > 0.5)
                    out.sector_coherence = std::max(out.sector_coherence, std::abs(out.rho(i, j)));
    }
    return out;
}

int auto_cutoff(const GeneratorData& data, int start, double tol)
{
    // First guess from the tail (N/(N+1))^c of a thermal marginal with the
    // largest Gaussian mode occupation N; the oracle's own leak decides.
    int c = std::max(2, start);
    const SteadyResult g = steady_state(build_moment_dynamics(data));
    if (g.state) {
        const double nmax = std::max(g.state->n.diagonal().real().maxCoeff(), 1e-12);
        const double guess = std::log(tol / static_cast<double>(data.d())) / std::log(nmax / (nmax + 1.0));
        c = std::max(c, static_cast<int>(std::min(guess, static_cast<double>(kMaxCutoff))));
    }
    for (;; c += 2) {
        c = std::min(c, kMaxCutoff);
        Index next = 1;
        for (Index m = 0; m < data.d(); ++m) next *= c + 1;
        if (next * next > kMaxSuperDimension) return c - 2;
        const OracleSteady s = oracle_steady(build_generator(data, c), 0);
        if (!s.solved || s.moments.leak < tol || c == kMaxCutoff) return c;
    }
}

} // namespace qtm
