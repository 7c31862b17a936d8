// model_io.cpp - Reader and writer for the TOML model-file schema
//
//   [units]                 reference_frequency
//   [system]                d, H (row-major, complex strings "re+imj" or numbers),
//                           partition (1-based mode lists), eta
//   [bath.<n>]              kind = "bosonic"|"spin", beta, mu, tauB
//   [bath.<n>.spectral]     family = "flat"|"ohmic", strength, cutoff,
//                           coupling (rank-1 vector) | matrix (row-major)
//   [options]               regime, lamb, lamb_cutoff, hermiticity_tol,
//                           degeneracy_tol, psd_tol

#include "qtm/model.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

namespace qtm {

namespace {

double parse_real(std::string_view s, const std::string& whole)
{
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
        throw ParseError("malformed complex number '" + whole + "'");
    }
    return value;
}

[[noreturn]] void missing(const std::string& where, const std::string& key)
{
    throw ParseError(where + ": missing or ill-typed key '" + key + "'");
}

double get_real(const toml::table& t, const std::string& where, const std::string& key)
{
    const auto* node = t.get(key);
    if (!node) missing(where, key);
    if (auto v = node->value<double>()) return *v;
    missing(where, key);
}

double get_real_or(const toml::table& t, const std::string& key, double fallback)
{
    const auto* node = t.get(key);
    if (!node) return fallback;
    if (auto v = node->value<double>()) return *v;
    throw ParseError("ill-typed key '" + key + "'");
}

std::string get_string(const toml::table& t, const std::string& where, const std::string& key)
{
    const auto* node = t.get(key);
    if (!node) missing(where, key);
    if (auto v = node->value<std::string>()) return *v;
    missing(where, key);
}

cd complex_entry(const toml::node& node, const std::string& where)
{
    if (auto s = node.value<std::string>()) return parse_complex(*s);
    if (auto v = node.value<double>()) return {*v, 0.0};
    throw ParseError(where + ": expected a number or complex string");
}

std::vector<cd> complex_list(const toml::table& t, const std::string& where, const std::string& key)
{
    const auto* arr = t.get_as<toml::array>(key);
    if (!arr) missing(where, key);
    std::vector<cd> out;
    for (const auto& node : *arr) out.push_back(complex_entry(node, where + "." + key));
    return out;
}

const toml::table& subtable(const toml::table& t, const std::string& where, const std::string& key)
{
    const auto* sub = t.get_as<toml::table>(key);
    if (!sub) throw ParseError(where + ": missing section [" + key + "]");
    return *sub;
}

Eigen::MatrixXcd square_from(const std::vector<cd>& entries, Index n, const std::string& where)
{
    if (static_cast<Index>(entries.size()) != n * n) {
        throw ParseError(where + ": expected " + std::to_string(n * n) + " entries, got " +
                         std::to_string(entries.size()));
    }
    Eigen::MatrixXcd m(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) m(i, j) = entries[static_cast<std::size_t>(i * n + j)];
    return m;
}

BathModel parse_bath(const toml::table& t, Index size, const std::string& where)
{
    BathModel bath;
    const std::string kind = get_string(t, where, "kind");
    if (kind == "bosonic") {
        bath.statistics = Statistics::Bosonic;
    } else if (kind == "spin") {
        bath.statistics = Statistics::Spin;
    } else {
        throw ParseError(where + ": unknown bath kind '" + kind + "'");
    }
    bath.beta = get_real(t, where, "beta");
    bath.mu = get_real_or(t, "mu", 0.0);
    bath.tau_b = get_real_or(t, "tauB", 0.0);

    const std::string swhere = where + ".spectral";
    const auto& sp = subtable(t, where, "spectral");
    const std::string family = get_string(sp, swhere, "family");
    if (family == "flat") {
        bath.J.profile = Profile::Flat;
    } else if (family == "ohmic") {
        bath.J.profile = Profile::Ohmic;
    } else {
        throw ParseError(swhere + ": unknown spectral family '" + family + "'");
    }
    bath.J.strength = get_real(sp, swhere, "strength");
    bath.J.cutoff = get_real(sp, swhere, "cutoff");
    const bool has_vec = sp.contains("coupling");
    const bool has_mat = sp.contains("matrix");
    if (has_vec && has_mat) throw ParseError(swhere + ": give either 'coupling' or 'matrix', not both");
    if (has_vec) {
        const auto u = complex_list(sp, swhere, "coupling");
        if (static_cast<Index>(u.size()) != size) {
            throw ParseError(swhere + ": coupling vector length does not match subsystem size");
        }
        Eigen::VectorXcd v(size);
        for (Index i = 0; i < size; ++i) v(i) = u[static_cast<std::size_t>(i)];
        bath.J.coupling = v * v.adjoint();
    } else if (has_mat) {
        bath.J.coupling = square_from(complex_list(sp, swhere, "matrix"), size, swhere + ".matrix");
    } else {
        bath.J.coupling = Eigen::MatrixXcd::Identity(size, size);
    }
    return bath;
}

std::string fmt_real(double x)
{
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    std::string s(buf);
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    return s;
}

std::string fmt_complex_list(const Eigen::MatrixXcd& m)
{
    std::ostringstream os;
    os << "[";
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            if (i || j) os << ", ";
            os << '"' << format_complex(m(i, j)) << '"';
        }
    }
    os << "]";
    return os.str();
}

} // namespace

cd parse_complex(const std::string& text)
{
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    if (s.empty()) throw ParseError("malformed complex number ''");
    if (s.back() != 'j' && s.back() != 'i') return {parse_real(s, text), 0.0};
    s.pop_back();
    std::size_t split = std::string::npos;
    for (std::size_t k = s.size(); k-- > 1;) {
        if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
            split = k;
            break;
        }
    }
    const std::string re = split == std::string::npos ? std::string() : s.substr(0, split);
    std::string im = split == std::string::npos ? s : s.substr(split);
    if (im.empty() || im == "+") im = "1";
    if (im == "-") im = "-1";
    return {re.empty() ? 0.0 : parse_real(re, text), parse_real(im, text)};
}

std::string format_complex(cd z)
{
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.17g%+.17gj", z.real(), z.imag());
    return buf;
}

MachineSpec parse_machine(const std::string& text)
{
    toml::table root;
    try {
        root = toml::parse(text);
    } catch (const toml::parse_error& err) {
        std::ostringstream os;
        os << "model file: " << err.description() << " (line " << err.source().begin.line << ")";
        throw ParseError(os.str());
    }

    MachineSpec spec;
    if (const auto* units = root.get_as<toml::table>("units")) {
        spec.options.reference_frequency = get_real_or(*units, "reference_frequency", 1.0);
    }

    const auto& sys = subtable(root, "model", "system");
    const auto* d_node = sys.get("d");
    if (!d_node || !d_node->value<int64_t>()) missing("system", "d");
    const Index d = static_cast<Index>(*d_node->value<int64_t>());
    if (d < 1) throw ParseError("system: d must be >= 1");
    spec.network.H = square_from(complex_list(sys, "system", "H"), d, "system.H");

    const auto* parts = sys.get_as<toml::array>("partition");
    if (!parts) missing("system", "partition");
    for (const auto& part : *parts) {
        const auto* arr = part.as_array();
        if (!arr) throw ParseError("system.partition: each subsystem must be a list of mode indices");
        std::vector<Index> modes;
        for (const auto& m : *arr) {
            auto v = m.value<int64_t>();
            if (!v) throw ParseError("system.partition: mode indices must be integers");
            modes.push_back(static_cast<Index>(*v) - 1);
        }
        spec.network.partition.push_back(std::move(modes));
    }
    if (const auto* eta = sys.get_as<toml::array>("eta")) {
        for (const auto& e : *eta) {
            auto v = e.value<int64_t>();
            if (!v) throw ParseError("system.eta: flags must be integers");
            spec.network.eta.push_back(static_cast<int>(*v));
        }
    } else {
        spec.network.eta.assign(static_cast<std::size_t>(d), 0);
    }

    const auto* baths = root.get_as<toml::table>("bath");
    if (!baths) throw ParseError("model: missing [bath.<n>] sections");
    const std::size_t count = baths->size();
    for (std::size_t n = 1; n <= count; ++n) {
        const std::string key = std::to_string(n);
        const auto* bt = baths->get_as<toml::table>(key);
        if (!bt) throw ParseError("model: bath sections must be numbered 1.." + std::to_string(count));
        if (n > spec.network.partition.size()) {
            throw ParseError("model: more bath sections than subsystems");
        }
        const Index size = static_cast<Index>(spec.network.partition[n - 1].size());
        spec.baths.push_back(parse_bath(*bt, size, "bath." + key));
    }

    if (const auto* opt = root.get_as<toml::table>("options")) {
        if (const auto* r = opt->get("regime")) {
            auto v = r->value<std::string>();
            if (!v) throw ParseError("options: regime must be a string");
            spec.options.regime = parse_regime(*v);
        }
        if (const auto* l = opt->get("lamb")) {
            auto v = l->value<bool>();
            if (!v) throw ParseError("options: lamb must be a boolean");
            spec.options.lamb = *v;
        }
        if (opt->contains("lamb_cutoff")) spec.options.lamb_cutoff = get_real(*opt, "options", "lamb_cutoff");
        spec.options.hermiticity_tol = get_real_or(*opt, "hermiticity_tol", spec.options.hermiticity_tol);
        spec.options.degeneracy_tol = get_real_or(*opt, "degeneracy_tol", spec.options.degeneracy_tol);
        spec.options.psd_tol = get_real_or(*opt, "psd_tol", spec.options.psd_tol);
    }

    validate(spec);
    return spec;
}

MachineSpec load_machine(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open model file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_machine(buf.str());
}

std::string format_machine(const MachineSpec& spec)
{
    std::ostringstream os;
    const auto& net = spec.network;
    os << "[units]\nreference_frequency = " << fmt_real(spec.options.reference_frequency) << "\n\n";
    os << "[system]\nd = " << net.d() << "\n";
    os << "H = " << fmt_complex_list(net.H) << "\n";
    os << "partition = [";
    for (std::size_t n = 0; n < net.partition.size(); ++n) {
        if (n) os << ", ";
        os << "[";
        for (std::size_t k = 0; k < net.partition[n].size(); ++k) {
            if (k) os << ", ";
            os << net.partition[n][k] + 1;
        }
        os << "]";
    }
    os << "]\neta = [";
    for (std::size_t j = 0; j < net.eta.size(); ++j) os << (j ? ", " : "") << net.eta[j];
    os << "]\n";

    for (std::size_t n = 0; n < spec.baths.size(); ++n) {
        const auto& b = spec.baths[n];
        os << "\n[bath." << n + 1 << "]\n";
        os << "kind = \"" << to_string(b.statistics) << "\"\n";
        os << "beta = " << fmt_real(b.beta) << "\n";
        os << "mu = " << fmt_real(b.mu) << "\n";
        os << "tauB = " << fmt_real(b.tau_b) << "\n";
        os << "\n[bath." << n + 1 << ".spectral]\n";
        os << "family = \"" << to_string(b.J.profile) << "\"\n";
        os << "strength = " << fmt_real(b.J.strength) << "\n";
        os << "cutoff = " << fmt_real(b.J.cutoff) << "\n";
        os << "matrix = " << fmt_complex_list(b.J.coupling) << "\n";
    }

    const auto& o = spec.options;
    os << "\n[options]\n";
    os << "regime = \"" << to_string(o.regime) << "\"\n";
    os << "lamb = " << (o.lamb ? "true" : "false") << "\n";
    if (o.lamb_cutoff) os << "lamb_cutoff = " << fmt_real(*o.lamb_cutoff) << "\n";
    os << "hermiticity_tol = " << fmt_real(o.hermiticity_tol) << "\n";
    os << "degeneracy_tol = " << fmt_real(o.degeneracy_tol) << "\n";
    os << "psd_tol = " << fmt_real(o.psd_tol) << "\n";
    return os.str();
}

void save_machine(const MachineSpec& spec, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write model file " + path.string());
    out << format_machine(spec);
}

} // namespace qtm
