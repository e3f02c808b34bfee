#include "nsmbs/cli.hpp"
#include "nsmbs/io.hpp"
#include "nsmbs/modal.hpp"
#include "nsmbs/scenarios.hpp"
#include "nsmbs/spectral.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <numbers>
#include <sstream>

namespace py = pybind11;
using namespace nsmbs;

namespace {

IntegratorConfig scheme_config(const std::string& scheme, double rho_inf) {
    IntegratorConfig c;
    c.scheme = parse_scheme(scheme);
    c.rho_inf = rho_inf;
    c.dt = 1.0;
    return c;
}

Matrix trajectory_array(const Trajectory& tr) {
    Matrix a(static_cast<Eigen::Index>(tr.rows.size()), static_cast<Eigen::Index>(tr.names.size()));
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = tr.rows[i][j];
    return a;
}

ScenarioConfig scenario(const std::string& id, const std::map<std::string, std::string>& overrides,
                        const std::vector<std::string>& channels) {
    ScenarioConfig cfg = named_scenario(id, overrides);
    if (!channels.empty()) cfg.channels = channels;
    return cfg;
}

SolveContext context(const Matrix& M, const Matrix& W_N, const Matrix& W_T, const Vector& u, const Vector& mu,
                     double scale, double r) {
    const EffectiveOperator op(M);
    IndexSet act(W_N.cols());
    for (int k = 0; k < static_cast<int>(act.size()); ++k) act[k] = k;
    return build_context(W_N, W_T, op, u, mu, scale, r, act);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "mixed timestepping for nonsmooth flexible multibody systems";

    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);

    m.def("galpha_params", [](double rho) {
        const GAlphaParams p = galpha_params(rho);
        return py::dict(py::arg("alpha_m") = p.alpha_m, py::arg("alpha_f") = p.alpha_f, py::arg("gamma") = p.gamma,
                        py::arg("beta") = p.beta);
    }, py::arg("rho_inf"));

    m.def("amplification_galpha", [](double W, double rho) { return amplification_galpha(W, galpha_params(rho)); },
          py::arg("omega_dt"), py::arg("rho_inf"));
    m.def("amplification_bathe", &amplification_bathe, py::arg("omega_dt"));
    m.def("numerical_amplification",
          [](const std::string& scheme, double W, double rho) {
              return numerical_amplification(scheme_config(scheme, rho), W);
          },
          py::arg("scheme"), py::arg("omega_dt"), py::arg("rho_inf") = 0.5);
    m.def("spectral_radius", &spectral_radius, py::arg("A"));
    m.def("spectral_sweep",
          [](const std::string& scheme, double rho, int points, double lo, double hi, const std::string& method) {
              const SpectralSweep s = spectral_sweep(scheme_config(scheme, rho), points, lo, hi,
                                                     method == "numerical" ? SpectralMethod::Numerical
                                                                           : SpectralMethod::ClosedForm);
              std::vector<double> pe;
              for (const auto& e : s.period_error) pe.push_back(e ? *e : std::nan(""));
              return py::dict(py::arg("dt_over_T") = s.dt_over_T, py::arg("rho") = s.rho,
                              py::arg("period_error") = pe);
          },
          py::arg("scheme") = "galpha", py::arg("rho_inf") = 0.5, py::arg("points") = 400, py::arg("lo") = 1e-3,
          py::arg("hi") = 1e2, py::arg("method") = "closed");

    m.def("solve_contact_forces",
          [](const Matrix& M, const Matrix& W_N, const Matrix& W_T, const Vector& u, const Vector& mu, double scale,
             double r) {
              const SolveContext ctx = context(M, W_N, W_T, u, mu, scale, r);
              const ContactForces f = solve_contact_forces(ctx, ctx.size());
              return py::make_tuple(f.lambda_N, f.lambda_T);
          },
          py::arg("M"), py::arg("W_N"), py::arg("W_T"), py::arg("u"), py::arg("mu"), py::arg("scale") = 1.0,
          py::arg("r") = 0.1);
    m.def("solve_impulses",
          [](const Matrix& M, const Matrix& W_N, const Matrix& W_T, const Vector& v_minus, const Vector& mu,
             const Vector& eps_N, const Vector& eps_T, double r) {
              const SolveContext ctx = context(M, W_N, W_T, v_minus, mu, 1.0, r);
              const ImpulseForces imp = solve_impulses(ctx, eps_N, eps_T, ctx.size());
              return py::make_tuple(imp.Lambda_N, imp.Lambda_T, apply_impulse(M, v_minus, W_N, W_T, imp));
          },
          py::arg("M"), py::arg("W_N"), py::arg("W_T"), py::arg("v_minus"), py::arg("mu"), py::arg("eps_N"),
          py::arg("eps_T"), py::arg("r") = 1e-3);

    m.def("simulate",
          [](const std::string& id, const std::map<std::string, std::string>& overrides,
             const std::vector<std::string>& channels) {
              const ScenarioConfig cfg = scenario(id, overrides, channels);
              RunResult r;
              {
                  py::gil_scoped_release release;
                  r = run_scenario(cfg);
              }
              return py::dict(py::arg("names") = r.trajectory.names, py::arg("data") = trajectory_array(r.trajectory),
                              py::arg("completed") = r.completed, py::arg("failure") = r.failure,
                              py::arg("steps") = r.steps, py::arg("impacts") = r.impacts,
                              py::arg("config_hash") = config_hash(cfg));
          },
          py::arg("scenario"), py::arg("overrides") = std::map<std::string, std::string>{},
          py::arg("channels") = std::vector<std::string>{});

    m.def("convergence_study",
          [](const std::string& id, const std::vector<double>& dts, const std::vector<std::string>& channels,
             const std::map<std::string, std::string>& overrides, int threads) {
              const ScenarioConfig cfg = scenario(id, overrides, {});
              ErrorReport rep;
              {
                  py::gil_scoped_release release;
                  rep = convergence_study(cfg, dts, channels, threads);
              }
              py::dict errors;
              for (std::size_t c = 0; c < rep.channels.size(); ++c) {
                  std::vector<double> e;
                  for (const auto& x : rep.errors[c]) e.push_back(x.value);
                  errors[py::str(rep.channels[c])] = e;
              }
              return py::dict(py::arg("dts") = rep.dts, py::arg("errors") = errors, py::arg("slopes") = rep.slopes,
                              py::arg("monotone") = rep.monotone, py::arg("reference_dt") = rep.reference_dt);
          },
          py::arg("scenario"), py::arg("dts"), py::arg("channels"),
          py::arg("overrides") = std::map<std::string, std::string>{}, py::arg("threads") = 1);

    m.def("modes",
          [](const std::string& bc, int n_elements, int n_modes, bool include_slider) {
              fem::SliderCrankParams p;
              p.n_elements = n_elements;
              const modal::ModalBasis b = modal::modal_basis(p, fem::parse_boundary_condition(bc), n_modes, include_slider);
              return Vector(b.omegas / (2.0 * std::numbers::pi));
          },
          py::arg("bc") = "clamped", py::arg("n_elements") = 4, py::arg("n_modes") = 8,
          py::arg("include_slider") = true);

    m.def("mass_spring_frequencies",
          [](const std::string& variant) {
              const ModalSolution ms = mass_spring_modes(variant == "b" ? MassSpringVariant::BilateralConstraint
                                                                        : MassSpringVariant::StiffSpring);
              return Vector(ms.omegas / (2.0 * std::numbers::pi));
          },
          py::arg("variant") = "a");

    m.def("run_cli", [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code;
        {
            py::gil_scoped_release release;
            code = run_cli(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
    }, py::arg("args"));

    m.def("override_keys", &override_keys);
}
