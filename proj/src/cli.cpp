#include "nsmbs/cli.hpp"

#include "nsmbs/io.hpp"
#include "nsmbs/modal.hpp"
#include "nsmbs/scenarios.hpp"
#include "nsmbs/spectral.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>

namespace nsmbs {

namespace {

struct ScenarioOptions {
    std::string scenario = "slider_crank_t1";
    std::string config;
    std::vector<std::string> set;
    std::string integrator, model, channels;
    double dt = 0.0, t_end = 0.0, rho_inf = -1.0;
};

void add_scenario_options(CLI::App* sub, ScenarioOptions& o) {
    sub->add_option("--scenario", o.scenario,
                    "slider_crank_t1, slider_crank_t2, bilateral, mass_spring_a or mass_spring_b");
    sub->add_option("--config", o.config, "key=value file with [section] headers");
    sub->add_option("--set", o.set, "key=value override, repeatable");
    sub->add_option("--integrator", o.integrator, "galpha, bathe, edalpha or moreau");
    sub->add_option("--model", o.model, "rigid, fem or modal");
    sub->add_option("--dt", o.dt, "time step [s]");
    sub->add_option("--t-end", o.t_end, "end time [s]");
    sub->add_option("--rho-inf", o.rho_inf, "spectral radius at infinity");
    sub->add_option("--channels", o.channels, "comma-separated channel groups");
}

ScenarioConfig resolve(const ScenarioOptions& o) {
    std::map<std::string, std::string> kv;
    if (!o.config.empty()) kv = read_config_file(o.config);
    std::string id = o.scenario;
    if (auto it = kv.find("scenario"); it != kv.end()) id = it->second;
    if (auto it = kv.find("id"); it != kv.end()) id = it->second;
    for (const std::string& s : o.set) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ParseError("--set expects key=value, got '" + s + "'");
        kv[s.substr(0, eq)] = s.substr(eq + 1);
    }
    if (!o.integrator.empty()) kv["integrator"] = o.integrator;
    if (!o.model.empty()) kv["model"] = o.model;
    if (o.dt > 0.0) kv["dt"] = format_double(o.dt);
    if (o.t_end > 0.0) kv["t_end"] = format_double(o.t_end);
    if (o.rho_inf >= 0.0) kv["rho_inf"] = format_double(o.rho_inf);
    if (!o.channels.empty()) kv["channels"] = o.channels;
    ScenarioConfig cfg = named_scenario(id);
    // id-dependent keys (m1..m3, gamma) resolve against the chosen scenario
    apply_overrides(cfg, kv);
    return cfg;
}

int cmd_simulate(const ScenarioOptions& o, const std::string& out_path, std::ostream& out, std::ostream& err) {
    ScenarioConfig cfg = resolve(o);
    if (!out_path.empty()) cfg.output = out_path;
    for (const std::string& w : cfg.integrator.check()) err << "warning: " << w << '\n';
    const RunResult r = run_scenario(cfg);
    if (!cfg.output.empty()) write_csv(cfg.output, r.trajectory);
    // with the CSV on stdout the summary goes to stderr
    std::ostream& info = cfg.output.empty() ? err : out;
    info << "scenario " << cfg.id << " config_hash " << std::hex << std::setw(16) << std::setfill('0')
        << config_hash(cfg) << std::dec << std::setfill(' ') << '\n';
    info << "steps " << r.steps << " impacts " << r.impacts << " rows " << r.trajectory.rows.size() << '\n';
    if (!r.completed) {
        err << "solver failure: " << r.failure << '\n';
        return kExitSolver;
    }
    if (cfg.output.empty()) write_csv(out, r.trajectory);
    return kExitOk;
}

int cmd_spectral(const std::string& scheme, double rho_inf, int points, double lo, double hi,
                 const std::string& method, const std::string& out_path, std::ostream& out, std::ostream& err) {
    IntegratorConfig cfg;
    cfg.scheme = parse_scheme(scheme);
    cfg.rho_inf = rho_inf;
    cfg.galpha_resolved();
    cfg.ed_resolved();
    SpectralMethod m;
    if (method == "closed")
        m = SpectralMethod::ClosedForm;
    else if (method == "numerical")
        m = SpectralMethod::Numerical;
    else
        throw ParseError("--method must be closed or numerical");
    const SpectralSweep s = spectral_sweep(cfg, points, lo, hi, m);
    Trajectory tr;
    tr.names = {"dt_over_T", "Omega", "rho", "period_error"};
    for (std::size_t i = 0; i < s.rho.size(); ++i)
        tr.rows.push_back({s.dt_over_T[i], s.omegas[i], s.rho[i],
                           s.period_error[i] ? *s.period_error[i] : std::numeric_limits<double>::quiet_NaN()});
    if (out_path.empty())
        write_csv(out, tr);
    else
        write_csv(out_path, tr);
    (out_path.empty() ? err : out) << "scheme " << s.scheme << " points " << s.rho.size() << " rho_max "
        << format_double(*std::max_element(s.rho.begin(), s.rho.end())) << '\n';
    return kExitOk;
}

int cmd_converge(const ScenarioOptions& o, const std::string& dts_s, const std::string& channels_s,
                 const std::string& out_path, std::ostream& out, std::ostream& err) {
    ScenarioOptions oo = o;
    if (oo.scenario.empty()) oo.scenario = "bilateral";
    ScenarioConfig cfg = resolve(oo);
    const std::vector<double> dts = parse_double_list(dts_s);
    std::vector<std::string> channels = split_list(channels_s);
    if (channels.empty()) channels = {"q_theta2"};
    if (cfg.is_mass_spring() && channels_s.empty()) channels = {"q_q1"};
    cfg.channels = {"q", "v"};
    for (const std::string& ch : channels)
        if (ch.rfind("lam", 0) == 0 || ch.rfind("Lam", 0) == 0 || ch.rfind("g", 0) == 0 ||
            ch.rfind("energy", 0) == 0 || ch.rfind("slider", 0) == 0) {
            const std::string group = ch.substr(0, ch.find('_'));
            if (std::find(cfg.channels.begin(), cfg.channels.end(), group) == cfg.channels.end())
                cfg.channels.push_back(group);
        }
    for (const std::string& w : cfg.integrator.check()) err << "warning: " << w << '\n';
    const ErrorReport rep = convergence_study(cfg, dts, channels, thread_limit());
    std::ostream& info = out_path.empty() ? err : out;
    std::ostringstream csv;
    csv << "channel,dt,error,samples_used,samples_skipped,slope,monotone\n";
    for (std::size_t c = 0; c < rep.channels.size(); ++c) {
        for (std::size_t i = 0; i < rep.dts.size(); ++i)
            csv << rep.channels[c] << ',' << format_double(rep.dts[i]) << ',' << format_double(rep.errors[c][i].value)
                << ',' << rep.errors[c][i].used << ',' << rep.errors[c][i].skipped << ','
                << format_double(rep.slopes[c]) << ',' << (rep.monotone[c] ? 1 : 0) << '\n';
        info << "slope " << rep.channels[c] << ' ' << format_double(rep.slopes[c])
            << (rep.monotone[c] ? "" : " (errors not monotone in dt)") << '\n';
    }
    info << "reference_dt " << format_double(rep.reference_dt) << '\n';
    if (out_path.empty()) {
        out << csv.str();
    } else {
        std::ofstream f(out_path, std::ios::binary);
        if (!f) throw IoError("cannot open '" + out_path + "' for writing");
        f << csv.str();
    }
    return kExitOk;
}

int cmd_modes(const std::string& bc_s, int n_el, int n_modes, bool no_slider, double cutoff,
              const std::string& out_path, std::ostream& out, std::ostream& err) {
    fem::SliderCrankParams p;
    p.n_elements = n_el;
    const fem::BoundaryCondition bc = fem::parse_boundary_condition(bc_s);
    const int n_f = 3 * (n_el + 1) - static_cast<int>(fem::constrained_dofs(bc, n_el).size()) -
                    (bc == fem::BoundaryCondition::ArticulatedFree ? 1 : 0);
    const int n = n_modes > 0 ? n_modes : n_f;
    const modal::ModalBasis b = modal::modal_basis(p, bc, n, !no_slider);
    Trajectory tr;
    tr.names = {"mode", "omega", "f_hz"};
    for (int k = 0; k < b.omegas.size(); ++k)
        tr.rows.push_back({static_cast<double>(k + 1), b.omegas[k], b.omegas[k] / (2.0 * std::numbers::pi)});
    if (out_path.empty())
        write_csv(out, tr);
    else
        write_csv(out_path, tr);
    (out_path.empty() ? err : out) << "bc " << fem::boundary_condition_name(bc) << " modes " << b.omegas.size() << " below "
        << format_double(cutoff) << " Hz: " << modal::modes_below(b, cutoff) << '\n';
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"mixed timestepping for nonsmooth flexible multibody systems", "nsmbs"};
    app.require_subcommand(1);

    ScenarioOptions sim_opt;
    std::string sim_out;
    auto* sim = app.add_subcommand("simulate", "run a scenario and write its trajectory as CSV");
    add_scenario_options(sim, sim_opt);
    sim->add_option("--out", sim_out, "CSV output path (stdout when omitted)");

    std::string sp_scheme = "galpha", sp_method = "closed", sp_out;
    double sp_rho = 0.5, sp_lo = 1e-3, sp_hi = 1e2;
    int sp_points = 400;
    auto* spec = app.add_subcommand("spectral", "spectral radius and period error sweep");
    spec->add_option("--scheme", sp_scheme, "galpha, bathe, edalpha or moreau");
    spec->add_option("--rho-inf", sp_rho, "spectral radius at infinity");
    spec->add_option("--points", sp_points, "number of log-spaced dt/T points");
    spec->add_option("--lo", sp_lo, "smallest dt/T");
    spec->add_option("--hi", sp_hi, "largest dt/T");
    spec->add_option("--method", sp_method, "closed or numerical");
    spec->add_option("--out", sp_out, "CSV output path");

    ScenarioOptions cv_opt;
    cv_opt.scenario = "bilateral";
    std::string cv_dts = "1e-4,4e-5,2e-5,1e-5", cv_channels, cv_out;
    auto* conv = app.add_subcommand("converge", "convergence study against a finer self-reference");
    add_scenario_options(conv, cv_opt);
    conv->add_option("--dts", cv_dts, "comma-separated time steps");
    conv->add_option("--error-channels", cv_channels, "channels to compare, default q_theta2");
    conv->add_option("--out", cv_out, "CSV output path");

    std::string md_bc = "clamped", md_out;
    int md_el = 21, md_n = 0;
    bool md_no_slider = false;
    double md_cut = 1e7;
    auto* modes = app.add_subcommand("modes", "rod eigenfrequencies for a boundary condition");
    modes->add_option("--bc", md_bc, "clamped, pinned, articulated_free");
    modes->add_option("--n-elements", md_el, "number of beam elements");
    modes->add_option("--n-modes", md_n, "number of modes (all when 0)");
    modes->add_flag("--no-slider", md_no_slider, "leave the slider tip mass out of the eigenproblem");
    modes->add_option("--cutoff", md_cut, "frequency cutoff [Hz] for the count");
    modes->add_option("--out", md_out, "CSV output path");

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*sim) return cmd_simulate(sim_opt, sim_out, out, err);
        if (*spec) return cmd_spectral(sp_scheme, sp_rho, sp_points, sp_lo, sp_hi, sp_method, sp_out, out, err);
        if (*conv) return cmd_converge(cv_opt, cv_dts, cv_channels, cv_out, out, err);
        if (*modes) return cmd_modes(md_bc, md_el, md_n, md_no_slider, md_cut, md_out, out, err);
    } catch (const IoError& e) {
        err << "io error: " << e.what() << '\n';
        return kExitIo;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << '\n';
        return kExitParse;
    } catch (const IntegrationError& e) {
        err << "solver failure: " << e.what() << '\n';
        return kExitSolver;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitParse;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kExitInternal;
    }
    return kExitUsage;
}

}  // namespace nsmbs
