// Command-line front end: solve interpolation problems, identify spectra
// from time series, design sensitivity-shaping controllers, and sample
// spectral densities.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "cee/io.hpp"

namespace {

using cee::Complex;
using cee::Node;
using cee::Polynomial;
using nlohmann::json;

struct CommonFlags {
    std::string input;
    std::string output;
    std::string trace;
    std::optional<std::uint64_t> seed;
    int grid = 1024;
    std::optional<double> tol;
    std::optional<double> step;
    bool analytic_covariance = false;
};

void add_common(CLI::App* cmd, CommonFlags& f)
{
    cmd->add_option("--input", f.input, "input file")->required();
    cmd->add_option("--output", f.output, "output file")->required();
    cmd->add_option("--trace", f.trace, "auxiliary CSV output");
    cmd->add_option("--seed", f.seed, "seed override");
    cmd->add_option("--grid", f.grid, "grid size for sampled outputs");
    cmd->add_option("--tol", f.tol, "corrector tolerance");
    cmd->add_option("--step", f.step, "initial continuation step");
    cmd->add_flag("--analytic-covariance", f.analytic_covariance,
                  "use the exact model covariance instead of data");
}

cee::SolveOptions solve_options(const CommonFlags& f)
{
    cee::SolveOptions opts;
    if (f.tol) opts.homotopy.corrector_tolerance = *f.tol;
    if (f.step) opts.homotopy.initial_step = *f.step;
    return opts;
}

json config_echo(const json& input_config, const CommonFlags& f)
{
    json cfg = input_config;
    cfg["grid"] = f.grid;
    if (f.seed) cfg["seed"] = *f.seed;
    if (f.tol) cfg["tol"] = *f.tol;
    if (f.step) cfg["step"] = *f.step;
    if (f.analytic_covariance) cfg["analytic_covariance"] = true;
    return cfg;
}

int run_solve(const CommonFlags& flags)
{
    const json input = cee::io::parse_file(flags.input);
    const auto prob = cee::io::load_problem(input);
    if (prob.spectral_zeros.empty())
        cee::fail(cee::ErrorCode::InvalidInput, "problem file needs spectral_zeros");
    const Polynomial sigma = cee::io::sigma_from_zeros(prob.spectral_zeros);
    const auto opts = solve_options(flags);

    cee::CeeSolution sol;
    cee::HomotopyTrace trace;
    cee::RationalFunction f;
    double interp_err = 0.0;
    double pick_eig = 0.0;
    if (prob.exterior) {
        cee::SolveOptions o = opts;
        o.pivot = prob.pivot;
        auto res = cee::solve_problem(*prob.exterior, sigma, o);
        sol = std::move(res.cee);
        trace = std::move(res.trace);
        f = res.f;
        pick_eig = res.pick.min_eigenvalue;
        interp_err = cee::interpolation_error(f, *prob.exterior);
    } else {
        auto [s, t, ps] = cee::solve_caratheodory(*prob.disc, sigma, opts);
        sol = std::move(s);
        trace = std::move(t);
        pick_eig = cee::pick_solvable(ps).min_eigenvalue;
        f = sol.f;
    }

    json out = cee::io::solution_to_json(sol);
    out["f"] = {{"num", cee::io::to_json(f.num)},
                {"den", cee::io::to_json(f.den)},
                {"scale", f.scale}};
    out["interpolation_error"] = interp_err;
    out["pick_min_eigenvalue"] = pick_eig;
    out["steps"] = trace.steps.size();
    out["min_step"] = trace.min_step_taken;
    out["config"] = config_echo(input, flags);
    cee::io::write_json_file(flags.output, out);

    if (!flags.trace.empty()) {
        std::ostringstream os;
        cee::io::write_trace_csv(os, trace);
        cee::io::write_text_file(flags.trace, os.str());
    }
    return 0;
}

cee::CaratheodoryProblem bank_from_json(const json& bank)
{
    cee::CaratheodoryProblem cp;
    for (const auto& e : bank.at("nodes")) {
        const Node n = cee::io::node_from(e);
        if (n.at_infinity)
            cee::fail(cee::ErrorCode::InvalidInput, "bank nodes must be finite");
        cp.nodes.push_back(n.z);
    }
    if (bank.contains("multiplicities"))
        cp.multiplicities = bank["multiplicities"].get<std::vector<int>>();
    else
        cp.multiplicities.assign(cp.nodes.size(), 1);
    for (std::size_t j = 0; j < cp.nodes.size(); ++j) {
        cee::Series s(static_cast<std::size_t>(cp.multiplicities[j]), Complex(0.0));
        s[0] = 0.5;
        cp.values.push_back(std::move(s));
    }
    cp.validate();
    return cp;
}

int run_identify(const CommonFlags& flags)
{
    const json input = cee::io::parse_file(flags.input);
    if (!input.contains("bank") || !input.contains("spectral_zeros"))
        cee::fail(cee::ErrorCode::InvalidInput, "identify config needs bank and spectral_zeros");
    const auto cp_template = bank_from_json(input["bank"]);
    const auto structure = cee::build_structure(cp_template);

    std::optional<cee::specest::GeneratingModel> model;
    if (input.contains("model")) {
        cee::specest::GeneratingModel m;
        std::vector<Complex> zs, ps;
        for (const auto& e : input["model"].at("zeros")) zs.push_back(cee::io::complex_from(e));
        for (const auto& e : input["model"].at("poles")) ps.push_back(cee::io::complex_from(e));
        m.sigma = Polynomial::from_roots(zs, true, 1e-6);
        m.a = Polynomial::from_roots(ps, true, 1e-6);
        m.validate();
        model = std::move(m);
    }

    Eigen::MatrixXcd sigma_hat;
    long samples = 0;
    const std::uint64_t seed = flags.seed.value_or(input.value("seed", std::uint64_t(1)));
    if (flags.analytic_covariance) {
        if (!model)
            cee::fail(cee::ErrorCode::InvalidInput,
                      "analytic covariance needs a model in the config");
        sigma_hat = cee::specest::analytic_state_covariance(*model, structure);
    } else {
        std::vector<double> y;
        if (input.contains("series") && !input["series"].is_null()) {
            y = cee::io::read_series_csv(input["series"].get<std::string>());
        } else if (model) {
            const long n = input.value("samples", 100000L);
            y = cee::specest::simulate_series(*model, n, seed);
        } else {
            cee::fail(cee::ErrorCode::InvalidInput,
                      "identify needs either a series file or a model");
        }
        cee::specest::FilterBankOptions fopts;
        fopts.burn_in = input.value("burn_in", 1000L);
        fopts.window = input.value("window", 10000L);
        const auto est = cee::specest::run_filter_bank(y, structure, fopts);
        sigma_hat = est.sigma_hat;
        samples = est.samples;
    }

    const auto west = cee::specest::estimate_W(sigma_hat, structure);
    auto [cp, c0] = cee::specest::to_problem(west, structure);

    std::vector<Node> zero_nodes;
    for (const auto& e : input["spectral_zeros"]) zero_nodes.push_back(cee::io::node_from(e));
    const Polynomial sigma = cee::io::sigma_from_zeros(zero_nodes);

    const auto opts = solve_options(flags);
    auto [sol, trace, ps] = cee::solve_caratheodory(cp, sigma, opts);
    (void)trace;
    (void)ps;

    json out;
    out["c0"] = c0;
    out["samples"] = samples;
    json wvals = json::array();
    for (const auto& vs : west.values) {
        json node_vals = json::array();
        for (const auto& v : vs) node_vals.push_back(cee::io::to_json(v));
        wvals.push_back(node_vals);
    }
    out["w_estimate"] = wvals;
    out["w_fit_residual"] = west.residual;
    out["solution"] = cee::io::solution_to_json(sol);
    out["density_scale"] = c0;

    if (input.contains("reduce_to")) {
        std::vector<Complex> kept;
        for (const auto& e : input["reduce_to"]) kept.push_back(cee::io::complex_from(e));
        const auto rep = cee::specest::model_reduce(cp, sigma, kept, opts);
        out["reduced"] = {{"solution", cee::io::solution_to_json(rep.reduced)},
                          {"singular_values", cee::io::to_json(rep.reduced_singular_values)}};
    }
    out["config"] = config_echo(input, flags);
    cee::io::write_json_file(flags.output, out);

    if (!flags.trace.empty()) {
        const auto spec = cee::specest::estimate_spectrum(sol, flags.grid, c0);
        std::ostringstream os;
        cee::io::write_spectrum_csv(os, spec);
        cee::io::write_text_file(flags.trace, os.str());
    }
    return 0;
}

int run_design(const CommonFlags& flags)
{
    const json input = cee::io::parse_file(flags.input);
    cee::control::Plant plant;
    plant.num = cee::io::poly_from(input.at("plant").at("num"));
    plant.den = cee::io::poly_from(input.at("plant").at("den"));

    cee::control::SensitivitySpec spec;
    spec.gamma = input.at("gamma").get<double>();
    const int crd = input.value("controller_relative_degree", 1);
    spec.constraints = cee::control::sensitivity_constraints(plant, crd);
    for (const auto& e : input.at("spectral_zeros"))
        spec.spectral_zeros.push_back(cee::io::node_from(e));
    const std::string domain = input.value("zero_domain", std::string("s"));
    if (domain == "s")
        spec.zero_domain = cee::control::ZeroDomain::HalfPlane;
    else if (domain == "disc")
        spec.zero_domain = cee::control::ZeroDomain::Disc;
    else
        cee::fail(cee::ErrorCode::InvalidInput, "zero_domain must be 's' or 'disc'");
    if (input.contains("mobius")) {
        const auto m = input["mobius"].get<std::vector<double>>();
        if (m.size() != 4) cee::fail(cee::ErrorCode::InvalidInput, "mobius needs 4 entries");
        spec.mobius = cee::MobiusMap{Complex(m[0]), Complex(m[1]), Complex(m[2]), Complex(m[3])};
    }

    cee::control::SimulationOptions sim;
    if (input.contains("simulation")) {
        const auto& s = input["simulation"];
        sim.dt = s.value("dt", sim.dt);
        sim.horizon = s.value("horizon", sim.horizon);
        sim.settling_band = s.value("settling_band", sim.settling_band);
    }

    const auto result = cee::control::design(plant, spec, sim, solve_options(flags));

    const int freq_grid = std::max(flags.grid, 1000);
    const auto resp = cee::control::frequency_response(result.controller.sensitivity_num,
                                                       result.controller.sensitivity_den,
                                                       1e-3, 1e3, freq_grid);

    json out;
    out["controller"] = {{"num", cee::io::to_json(result.controller.num)},
                         {"den", cee::io::to_json(result.controller.den)}};
    json poles = json::array();
    for (const auto& r : result.controller.closed_loop_poles)
        poles.push_back(cee::io::to_json(r));
    out["closed_loop_poles"] = poles;
    out["metrics"] = {{"settling_time", result.metrics.settling_time},
                      {"overshoot_percent", result.metrics.overshoot_percent},
                      {"max_control", result.metrics.max_control},
                      {"settled", result.metrics.settled},
                      {"settling_band", sim.settling_band}};
    out["sensitivity"] = {{"num", cee::io::to_json(result.controller.sensitivity_num)},
                          {"den", cee::io::to_json(result.controller.sensitivity_den)}};
    out["sensitivity_peak"] = cee::control::peak_magnitude(resp);
    out["gamma"] = spec.gamma;
    out["sigma"] = cee::io::to_json(result.sigma);
    out["solution"] = cee::io::solution_to_json(result.cee);
    out["config"] = config_echo(input, flags);
    cee::io::write_json_file(flags.output, out);

    if (!flags.trace.empty()) {
        std::optional<std::vector<cee::control::FrequencySample>> ideal;
        if (input.contains("ideal_sensitivity")) {
            const auto in = cee::io::poly_from(input["ideal_sensitivity"].at("num"));
            const auto id = cee::io::poly_from(input["ideal_sensitivity"].at("den"));
            ideal = cee::control::frequency_response(in, id, 1e-3, 1e3, freq_grid);
        }
        std::ostringstream os;
        cee::io::write_frequency_csv(os, resp, ideal ? &*ideal : nullptr);
        cee::io::write_text_file(flags.trace, os.str());
    }
    return 0;
}

int run_spectrum(const CommonFlags& flags)
{
    const json input = cee::io::parse_file(flags.input);
    const json solj = input.contains("solution") ? input["solution"] : input;
    const auto sol = cee::io::solution_from_json(solj);
    const double scale = input.value("density_scale", 1.0);
    const auto spec = cee::specest::estimate_spectrum(sol, flags.grid, scale);
    std::ostringstream os;
    cee::io::write_spectrum_csv(os, spec);
    cee::io::write_text_file(flags.output, os.str());
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"analytic interpolation with degree and derivative constraints"};
    app.require_subcommand(1);

    CommonFlags solve_flags, identify_flags, design_flags, spectrum_flags;
    auto* solve_cmd = app.add_subcommand("solve", "solve one interpolation problem");
    add_common(solve_cmd, solve_flags);
    auto* identify_cmd =
        app.add_subcommand("identify", "estimate a spectral density from a time series");
    add_common(identify_cmd, identify_flags);
    auto* design_cmd =
        app.add_subcommand("design", "shape a sensitivity function and recover the controller");
    add_common(design_cmd, design_flags);
    auto* spectrum_cmd = app.add_subcommand("spectrum", "sample the density of a solution");
    add_common(spectrum_cmd, spectrum_flags);

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve_cmd->parsed()) return run_solve(solve_flags);
        if (identify_cmd->parsed()) return run_identify(identify_flags);
        if (design_cmd->parsed()) return run_design(design_flags);
        if (spectrum_cmd->parsed()) return run_spectrum(spectrum_flags);
    } catch (const cee::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
