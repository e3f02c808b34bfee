#pragma once

#include "nsmbs/contact_solver.hpp"
#include "nsmbs/core_model.hpp"

#include <functional>
#include <optional>
#include <string>

namespace nsmbs {

enum class Scheme { GeneralizedAlpha, Bathe, EDAlpha, Moreau };

Scheme parse_scheme(const std::string& name);
std::string scheme_name(Scheme s);

struct GAlphaParams {
    double alpha_m, alpha_f, gamma, beta;
};

struct EDParams {
    double alpha, alpha_AR;
};

GAlphaParams galpha_params(double rho_inf);
EDParams ed_params(double rho_inf);

class IntegrationError : public Error {
public:
    IntegrationError(const std::string& what, long step, double t) : Error(what), step(step), t(t) {}
    long step;
    double t;
};

struct IntegratorConfig {
    Scheme scheme = Scheme::GeneralizedAlpha;
    double rho_inf = 0.5;
    std::optional<GAlphaParams> galpha;  // overrides the rho_inf map
    std::optional<EDParams> ed;
    double dt = 1e-5;
    double fp_tol = 1e-10;
    int fp_max_iter = 50;
    double r_force = 0.1;
    std::optional<double> r_impulse;  // defaults to 0.1 * dt
    SolverSettings solver;
    bool contact_initial_acceleration = true;

    GAlphaParams galpha_resolved() const;
    EDParams ed_resolved() const;
    double impulse_r() const { return r_impulse ? *r_impulse : 0.1 * dt; }
    // warnings for parameter sets outside the stability region, empty when fine
    std::vector<std::string> check() const;
};

struct StepReport {
    GeneralizedState state;
    std::vector<ContactForces> forces;
    std::optional<ImpulseForces> impulses;
    int fp_iterations = 0;
    bool impacted = false;
};

GeneralizedState initial_state(const MechanicalModel& model, const Vector& q0, const Vector& v0,
                               const IntegratorConfig& cfg);

// base steps return v_minus = v_plus, the impulsive correction is added by mixed_step
StepReport step_generalized_alpha(const MechanicalModel& model, const GeneralizedState& s, const IntegratorConfig& cfg);
StepReport step_bathe(const MechanicalModel& model, const GeneralizedState& s, const IntegratorConfig& cfg);
StepReport step_ed_alpha(const MechanicalModel& model, const GeneralizedState& s, const IntegratorConfig& cfg);
StepReport step_moreau(const MechanicalModel& model, const GeneralizedState& s, const IntegratorConfig& cfg);

StepReport base_step(const MechanicalModel& model, const GeneralizedState& s, const IntegratorConfig& cfg);
StepReport mixed_step(const MechanicalModel& model, const GeneralizedState& s, const IntegratorConfig& cfg);

using Recorder = std::function<void(const StepReport&)>;

struct SimulationResult {
    GeneralizedState final_state;
    long steps = 0;
};

long step_count(double t_end, double dt);

SimulationResult simulate(const MechanicalModel& model, const Vector& q0, const Vector& v0,
                          const IntegratorConfig& cfg, double t_end, const Recorder& recorder = {});
SimulationResult simulate_from(const MechanicalModel& model, const GeneralizedState& s0,
                               const IntegratorConfig& cfg, double t_end, const Recorder& recorder = {});

}  // namespace nsmbs
