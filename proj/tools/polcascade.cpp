// polcascade command-line driver.
//
// Exit codes: 0 success, 1 invalid input, 2 numerical non-convergence.
// stdout carries one line of JSON; diagnostics go to stderr.

#include <CLI11.hpp>

#include <polcascade/config.hpp>
#include <polcascade/entanglement.hpp>
#include <polcascade/experiments.hpp>
#include <polcascade/io.hpp>

#include <filesystem>
#include <iostream>
#include <map>
#include <numbers>
#include <string>
#include <vector>

namespace pc = polcascade;
using json = nlohmann::ordered_json;

namespace {

std::string flag_name(const std::string& key)
{
    std::string f = key;
    for (char& ch : f)
        if (ch == '_') ch = '-';
    return "--" + f;
}

json paths_json(const std::vector<std::filesystem::path>& files)
{
    json a = json::array();
    for (const auto& f : files) a.push_back(f.generic_string());
    return a;
}

pc::Provenance run_provenance(const pc::RunConfig& c, const pc::SystemParams& p)
{
    pc::Provenance pv;
    pc::add_conventions(pv);
    pc::add_quadrature(pv, c.quadrature);
    pc::add_params(pv, p);
    pv.add("scheme", std::to_string(pc::to_int(c.scheme)));
    return pv;
}

json cmd_spectrum(const pc::RunConfig& c)
{
    const auto p = pc::effective_params(c);
    const auto grid = pc::linear_grid(c.spectrum_lo, c.spectrum_hi, c.spectrum_points);
    const auto s = pc::pl_spectrum(p, grid, pc::SpectrumReference::RelativeToExMean);
    auto pv = run_provenance(c, p);
    pv.add("energies", "relative to ex_mean");
    std::vector<std::filesystem::path> files{std::filesystem::path(c.out_dir) / "spectrum.csv"};
    pc::write_text_file(files.back(), pc::spectrum_csv(s, pv));
    if (c.svg) {
        files.push_back(std::filesystem::path(c.out_dir) / "spectrum.svg");
        pc::write_text_file(files.back(), pc::svg_line_plot("PL spectrum", "E - ex_mean (meV)", "intensity (arb.)",
                                                            s.energy_grid, {{"H", s.intensity_H}, {"V", s.intensity_V}}));
    }
    return {{"command", "spectrum"},
            {"detuning", p.detuning()},
            {"peaks_H", pc::spectrum_peaks(s, pc::Polarization::H)},
            {"peaks_V", pc::spectrum_peaks(s, pc::Polarization::V)},
            {"files", paths_json(files)}};
}

json cmd_sweep(const pc::RunConfig& c)
{
    const auto o = pc::figure_options(c);
    const auto curve = pc::fig4_sweep(c.scheme, o.sweep_grid, c.window, c.quadrature, c.workers, c.params);
    const auto base = c.params.apply(pc::scheme_preset(c.scheme), false);
    std::vector<std::filesystem::path> files{std::filesystem::path(c.out_dir) /
                                             ("sweep_" + pc::scheme_tag(c.scheme) + ".csv")};
    pc::write_text_file(files.back(), pc::detail::sweep_csv(curve, base, o));
    if (c.svg) {
        files.push_back(std::filesystem::path(c.out_dir) / ("sweep_" + pc::scheme_tag(c.scheme) + ".svg"));
        std::vector<double> y;
        for (const auto& r : curve.rows) y.push_back(r.abs_gamma);
        pc::write_text_file(files.back(), pc::svg_line_plot("|gamma'| " + pc::scheme_tag(c.scheme), "delta_C-X (meV)",
                                                            "|gamma'|", o.sweep_grid, {{pc::scheme_tag(c.scheme), y}}));
    }
    const auto& m = curve.max_row();
    return {{"command", "sweep"},
            {"scheme", pc::to_int(c.scheme)},
            {"points", curve.rows.size()},
            {"max_abs_gamma_prime", m.abs_gamma},
            {"max_at_detuning", m.detuning},
            {"files", paths_json(files)}};
}

json cmd_gamma(const pc::RunConfig& c)
{
    const auto p = pc::effective_params(c);
    const auto pairing = pc::effective_pairing(c);
    const auto w = pc::policy_window(p, pairing, c.window);
    const auto g = pc::gamma_prime(p, pairing, w, c.quadrature);
    json j = {{"command", "gamma"}, {"detuning", p.detuning()}};
    const json gj = pc::to_json(g);
    for (const auto& [k, v] : gj.items()) j[k] = v;
    const auto gu = pc::gamma_unprojected(p, c.quadrature);
    j["abs_gamma_unprojected"] = std::abs(gu);
    return j;
}

json cmd_entangle(const pc::RunConfig& c)
{
    const auto p = pc::effective_params(c);
    const auto pairing = pc::effective_pairing(c);
    const auto rho = pc::projected_state(p, pairing, pc::policy_window(p, pairing, c.window), c.quadrature);
    return pc::to_json(pc::peres_test(rho));
}

json cmd_optimize(const pc::RunConfig& c)
{
    const auto r = pc::optimize_detuning(c.scheme, c.opt_lo, c.opt_hi, c.quadrature, c.window, c.workers, c.params);
    return {{"command", "optimize"},
            {"scheme", pc::to_int(c.scheme)},
            {"detuning", r.detuning},
            {"abs_gamma_prime", r.abs_gamma},
            {"re_gamma", r.gamma.real()},
            {"im_gamma", r.gamma.imag()},
            {"evaluations", r.evaluations}};
}

json cmd_sample(const pc::RunConfig& c)
{
    const auto p = pc::effective_params(c);
    const auto pairing = pc::effective_pairing(c);
    const auto rho = pc::projected_state(p, pairing, pc::policy_window(p, pairing, c.window), c.quadrature);
    const double deg = std::numbers::pi / 180;
    const auto counts = pc::sample_coincidences(rho, c.angle_a * deg, c.angle_b * deg, c.samples, c.seed);
    const auto prob = pc::born_probabilities(rho, c.angle_a * deg, c.angle_b * deg);

    pc::Provenance pv = run_provenance(c, p);
    pv.add("angle_a_deg", c.angle_a).add("angle_b_deg", c.angle_b);
    pv.add("seed", std::to_string(c.seed)).add("n", std::to_string(c.samples));
    pv.add("rng", "mt19937_64 + discrete_distribution");
    pc::CsvTable t({"outcome", "count", "born_probability"});
    const char* names[2][2] = {{"TT", "TR"}, {"RT", "RR"}};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            t.add_row({names[i][j], std::to_string(counts[i][j]), pc::format_number(prob[i][j])});
    const auto file = std::filesystem::path(c.out_dir) / "counts.csv";
    pc::write_text_file(file, t.str(pv));
    return {{"command", "sample"},
            {"counts", {{"TT", counts[0][0]}, {"TR", counts[0][1]}, {"RT", counts[1][0]}, {"RR", counts[1][1]}}},
            {"files", paths_json({file})}};
}

json cmd_figures(const pc::RunConfig& c, bool all, const std::vector<std::string>& figs)
{
    if (!all && figs.empty()) throw pc::ValidationError("figures: pass --all or at least one --fig");
    std::vector<pc::Figure> which;
    if (all) which.assign(pc::kAllFigures.begin(), pc::kAllFigures.end());
    for (const auto& f : figs) which.push_back(pc::parse_figure(f));
    const auto o = pc::figure_options(c);
    std::vector<std::filesystem::path> files;
    for (pc::Figure f : which) {
        const auto w = pc::reproduce_figure(f, o);
        files.insert(files.end(), w.begin(), w.end());
    }
    return {{"command", "figures"}, {"files", paths_json(files)}};
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Biexciton cascade in an anisotropic polariton cavity: level structure, spectra and "
                 "polarization entanglement of the photon pairs."};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    app.add_option("--config", config_path, "flat 'key = value' configuration file");
    std::map<std::string, std::string> flag_values;
    for (const auto& k : pc::config_keys())
        app.add_option(flag_name(k.name), flag_values[k.name], k.help)->type_name("VALUE");

    bool echo = false;
    app.add_flag("--echo-config", echo, "print the effective configuration to stderr");

    auto* sp = app.add_subcommand("spectrum", "polarization-resolved PL spectrum");
    auto* sw = app.add_subcommand("sweep", "|gamma'| versus detuning for one scheme");
    auto* ga = app.add_subcommand("gamma", "projected and unprojected coherence at one detuning");
    auto* en = app.add_subcommand("entangle", "Peres test of the projected photon-pair state");
    auto* op = app.add_subcommand("optimize", "detuning that maximizes |gamma'|");
    auto* sa = app.add_subcommand("sample", "Monte Carlo polarizer coincidences");
    auto* fi = app.add_subcommand("figures", "write the figure data files");
    auto* cf = app.add_subcommand("config", "print the effective configuration");
    bool all = false;
    std::vector<std::string> figs;
    fi->add_flag("--all", all, "all figures: 2a 3a 1c 2c 3c 4");
    fi->add_option("--fig", figs, "one figure (repeatable): 2a 3a 1c 2c 3c 4");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        pc::RunConfig cfg;
        if (!config_path.empty()) pc::apply_config_file(cfg, config_path);
        pc::apply_worker_env(cfg);
        for (const auto& k : pc::config_keys())
            if (app.count(flag_name(k.name)) > 0) pc::set_key(cfg, k.name, flag_values[k.name], flag_name(k.name));
        pc::validate(cfg);
        if (echo) std::cerr << pc::config_echo(cfg);

        json out;
        if (*sp) out = cmd_spectrum(cfg);
        else if (*sw) out = cmd_sweep(cfg);
        else if (*ga) out = cmd_gamma(cfg);
        else if (*en) out = cmd_entangle(cfg);
        else if (*op) out = cmd_optimize(cfg);
        else if (*sa) out = cmd_sample(cfg);
        else if (*fi) out = cmd_figures(cfg, all, figs);
        else if (*cf) {
            std::cout << pc::config_echo(cfg);
            return 0;
        }
        std::cout << out.dump() << "\n";
        return 0;
    } catch (const pc::ConvergenceError& e) {
        std::cerr << "polcascade: " << e.what() << " (last estimates " << e.previous() << ", " << e.last() << ")\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "polcascade: " << e.what() << "\n";
        return 1;
    }
}
