#ifndef CEE_IO_HPP
#define CEE_IO_HPP

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cee/control.hpp"
#include "cee/equation.hpp"
#include "cee/homotopy.hpp"
#include "cee/poly.hpp"
#include "cee/problem.hpp"
#include "cee/solver.hpp"
#include "cee/specest.hpp"
#include "cee/version.hpp"

namespace cee::io {

using nlohmann::json;

inline json to_json(const Complex& c) { return json::array({c.real(), c.imag()}); }

inline Complex complex_from(const json& j)
{
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        fail(ErrorCode::InvalidInput, "expected [re, im] pair: " + j.dump());
    return {j[0].get<double>(), j[1].get<double>()};
}

inline json to_json(const Node& n)
{
    if (n.at_infinity) return json("inf");
    return to_json(n.z);
}

inline Node node_from(const json& j)
{
    if (j.is_string()) {
        if (j.get<std::string>() == "inf") return Node::infinity();
        fail(ErrorCode::InvalidInput, "unknown node literal: " + j.dump());
    }
    return Node::finite(complex_from(j));
}

/// Polynomials serialize as [re, im] pairs, highest power first.
inline json to_json(const Polynomial& p)
{
    json out = json::array();
    for (const auto& c : p.coefficients()) out.push_back(to_json(c));
    return out;
}

inline Polynomial poly_from(const json& j)
{
    if (!j.is_array()) fail(ErrorCode::InvalidInput, "polynomial must be an array");
    std::vector<Complex> c;
    for (const auto& e : j) {
        if (e.is_number())
            c.push_back(Complex(e.get<double>(), 0.0));
        else
            c.push_back(complex_from(e));
    }
    return Polynomial(std::move(c));
}

inline json to_json(const Eigen::VectorXd& v)
{
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

inline json to_json_rowmajor(const Eigen::MatrixXd& m)
{
    json out = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back(m(i, j));
    return out;
}

// ---------------------------------------------------------------------------
// problem files

struct SolveInput {
    std::optional<InterpolationProblem> exterior;
    std::optional<CaratheodoryProblem> disc;
    std::vector<Node> spectral_zeros;
    std::optional<std::size_t> pivot;
};

inline json parse_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) fail(ErrorCode::InvalidInput, "cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        fail(ErrorCode::InvalidInput, path + ": " + e.what());
    }
    return j;
}

inline SolveInput load_problem(const json& j)
{
    SolveInput out;
    if (!j.contains("nodes") || !j.contains("multiplicities") || !j.contains("values"))
        fail(ErrorCode::InvalidInput, "problem file needs nodes, multiplicities, values");
    const std::string domain = j.value("domain", std::string("exterior"));
    std::vector<Node> nodes;
    for (const auto& e : j["nodes"]) nodes.push_back(node_from(e));
    std::vector<int> mult = j["multiplicities"].get<std::vector<int>>();
    if (mult.size() != nodes.size())
        fail(ErrorCode::InvalidInput, "multiplicities do not match nodes");
    std::vector<Series> values;
    for (std::size_t k = 0; k < j["values"].size(); ++k) {
        Series s;
        for (const auto& e : j["values"][k]) s.push_back(complex_from(e));
        values.push_back(std::move(s));
    }
    if (values.size() != nodes.size())
        fail(ErrorCode::InvalidInput, "values do not match nodes");
    if (domain == "exterior") {
        InterpolationProblem p;
        p.nodes = nodes;
        p.multiplicities = mult;
        p.values = values;
        p.validate();
        out.exterior = std::move(p);
    } else if (domain == "disc") {
        CaratheodoryProblem p;
        for (const auto& n : nodes) {
            if (n.at_infinity) fail(ErrorCode::InvalidInput, "disc problems have finite nodes");
            p.nodes.push_back(n.z);
        }
        p.multiplicities = mult;
        p.values = values;
        p.validate();
        out.disc = std::move(p);
    } else {
        fail(ErrorCode::InvalidInput, "domain must be exterior or disc");
    }
    if (j.contains("spectral_zeros"))
        for (const auto& e : j["spectral_zeros"]) out.spectral_zeros.push_back(node_from(e));
    if (j.contains("pivot")) out.pivot = j["pivot"].get<std::size_t>();
    return out;
}

/// Spectral zeros named as points of the (normalized) disc frame: mirrors
/// outside points inside, sends infinity to the origin.
inline Polynomial sigma_from_zeros(const std::vector<Node>& zeros)
{
    std::vector<Complex> roots;
    for (const auto& n : zeros) {
        if (n.at_infinity) {
            roots.push_back(Complex(0.0));
        } else if (std::abs(n.z) > 1.0) {
            roots.push_back(1.0 / std::conj(n.z));
        } else {
            roots.push_back(n.z);
        }
    }
    return Polynomial::from_roots(roots, true, 1e-6);
}

// ---------------------------------------------------------------------------
// solution files

inline json solution_to_json(const CeeSolution& sol)
{
    json out;
    out["a"] = to_json(sol.a);
    out["b"] = to_json(sol.b);
    out["sigma"] = to_json(sol.sigma);
    out["rho"] = sol.rho;
    out["p"] = to_json(sol.p);
    out["P"] = to_json_rowmajor(sol.P);
    out["singular_values"] = to_json(sol.singular_values);
    out["equation_residual"] = sol.equation_residual;
    out["identity_residual"] = sol.identity_residual;
    return out;
}

inline CeeSolution solution_from_json(const json& j)
{
    CeeSolution sol;
    for (const char* key : {"a", "b", "sigma", "rho"})
        if (!j.contains(key))
            fail(ErrorCode::InvalidInput, std::string("solution file misses ") + key);
    sol.a = poly_from(j["a"]);
    sol.b = poly_from(j["b"]);
    sol.sigma = poly_from(j["sigma"]);
    sol.rho = j["rho"].get<double>();
    sol.f = RationalFunction{sol.b, sol.a, 0.5};
    if (j.contains("p")) {
        const auto v = j["p"].get<std::vector<double>>();
        sol.p = Eigen::VectorXd::Map(v.data(), static_cast<Eigen::Index>(v.size()));
    }
    return sol;
}

// ---------------------------------------------------------------------------
// CSV

inline void write_trace_csv(std::ostream& os, const HomotopyTrace& trace)
{
    if (trace.steps.empty()) return;
    const auto n = trace.steps.front().p.size();
    const auto npoles = trace.steps.front().poles.size();
    os << "lambda";
    for (Eigen::Index i = 0; i < n; ++i) os << ",p_" << (i + 1);
    os << ",residual,step";
    for (std::size_t i = 0; i < npoles; ++i)
        os << ",pole_re_" << (i + 1) << ",pole_im_" << (i + 1);
    os << "\n";
    const auto traj = pole_trajectories(trace);
    os.precision(17);
    for (std::size_t k = 0; k < trace.steps.size(); ++k) {
        const auto& st = trace.steps[k];
        os << st.lambda;
        for (Eigen::Index i = 0; i < n; ++i) os << "," << st.p(i);
        os << "," << st.residual << "," << st.step;
        for (const auto& pole : traj[k])
            os << "," << pole.real() << "," << pole.imag();
        os << "\n";
    }
}

inline void write_spectrum_csv(std::ostream& os,
                               const std::vector<specest::SpectrumSample>& samples)
{
    os << "theta,phi\n";
    os.precision(17);
    for (const auto& s : samples) os << s.theta << "," << s.density << "\n";
}

inline void write_frequency_csv(std::ostream& os,
                                const std::vector<control::FrequencySample>& sens,
                                const std::vector<control::FrequencySample>* ideal)
{
    os << (ideal ? "omega,mag_S,mag_S_ideal\n" : "omega,mag_S\n");
    os.precision(17);
    for (std::size_t i = 0; i < sens.size(); ++i) {
        os << sens[i].omega << "," << sens[i].magnitude;
        if (ideal) os << "," << (*ideal)[i].magnitude;
        os << "\n";
    }
}

/// One sample per line; blank lines and lines starting with # are skipped.
inline std::vector<double> read_series_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in) fail(ErrorCode::InvalidInput, "cannot open " + path);
    std::vector<double> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        try {
            out.push_back(std::stod(line));
        } catch (const std::exception&) {
            fail(ErrorCode::InvalidInput, path + ": bad sample '" + line + "'");
        }
    }
    return out;
}

inline void write_text_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path);
    if (!out) fail(ErrorCode::InvalidInput, "cannot open " + path + " for writing");
    out << text;
}

inline void write_json_file(const std::string& path, json j)
{
    j["version"] = version_string;
    write_text_file(path, j.dump(2) + "\n");
}

} // namespace cee::io

#endif
