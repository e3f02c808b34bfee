#include "common.hpp"

#include <cmath>
#include <sstream>

namespace nsmbs {

GeneralizedState initial_state(const MechanicalModel& model, const Vector& q0, const Vector& v0,
                               const IntegratorConfig& cfg) {
    if (q0.size() != model.n_dof() || v0.size() != model.n_dof())
        throw Error("initial state does not match the model dimension");
    GeneralizedState s;
    s.t = 0.0;
    s.q = q0;
    s.v_minus = v0;
    s.v_plus = v0;
    InitialAccelerationOptions o;
    o.include_contact_forces = cfg.contact_initial_acceleration;
    o.r = cfg.r_force;
    o.tau = cfg.dt;
    s.a = initial_acceleration(model, q0, v0, o);
    s.A = s.a;
    return s;
}

StepReport base_step(const MechanicalModel& model, const GeneralizedState& s, const IntegratorConfig& cfg) {
    switch (cfg.scheme) {
        case Scheme::GeneralizedAlpha: return step_generalized_alpha(model, s, cfg);
        case Scheme::Bathe: return step_bathe(model, s, cfg);
        case Scheme::EDAlpha: return step_ed_alpha(model, s, cfg);
        case Scheme::Moreau: return step_moreau(model, s, cfg);
    }
    throw Error("unknown scheme");
}

StepReport mixed_step(const MechanicalModel& model, const GeneralizedState& s, const IntegratorConfig& cfg) {
    StepReport rep = base_step(model, s, cfg);
    if (cfg.scheme == Scheme::Moreau || model.n_contacts() == 0) return rep;

    const Vector g_prev = model.normal_gaps(s.q);
    const Vector g_next = model.normal_gaps(rep.state.q);
    if (newly_closed(g_prev, g_next).empty()) return rep;

    const SystemEvaluation ev = model.evaluate(rep.state.q, rep.state.v_minus);
    const detail::ActiveContacts act = detail::select_active(model, ev.g_N);
    const EffectiveOperator op(ev.M, "mass matrix");
    const SolveContext ctx = build_context(restrict_columns(ev.W_N, act.idx), restrict_columns(ev.W_T, act.idx), op,
                                           rep.state.v_minus, act.mu, 1.0, cfg.impulse_r(), act.idx);
    const ContactParameters& cp = model.contact_parameters();
    ImpulseForces imp = solve_impulses(ctx, restrict_entries(cp.eps_N, act.idx), restrict_entries(cp.eps_T, act.idx),
                                       model.n_contacts(), cfg.solver);
    rep.state.v_plus = apply_impulse(ev.M, rep.state.v_minus, ev.W_N, ev.W_T, imp);
    rep.impulses = std::move(imp);
    rep.impacted = true;
    return rep;
}

long step_count(double t_end, double dt) {
    if (!(dt > 0.0)) throw Error("time step must be positive");
    return static_cast<long>(std::floor(t_end / dt + 1e-9));
}

SimulationResult simulate_from(const MechanicalModel& model, const GeneralizedState& s0, const IntegratorConfig& cfg,
                               double t_end, const Recorder& recorder) {
    cfg.check();
    if (!(t_end > 0.0)) throw Error("t_end must be positive");
    const long n = step_count(t_end, cfg.dt);
    SimulationResult res;
    res.final_state = s0;
    const double t0 = s0.t;
    for (long k = 0; k < n; ++k) {
        StepReport rep;
        try {
            rep = mixed_step(model, res.final_state, cfg);
        } catch (const Error& e) {
            std::ostringstream os;
            os << "step " << k + 1 << " (t = " << t0 + static_cast<double>(k) * cfg.dt << "): " << e.what();
            throw IntegrationError(os.str(), k + 1, t0 + static_cast<double>(k) * cfg.dt);
        }
        rep.state.t = t0 + static_cast<double>(k + 1) * cfg.dt;
        if (!rep.state.q.allFinite() || !rep.state.v_plus.allFinite()) {
            std::ostringstream os;
            os << "step " << k + 1 << " (t = " << rep.state.t << "): non-finite state";
            throw IntegrationError(os.str(), k + 1, rep.state.t);
        }
        res.final_state = rep.state;
        res.steps = k + 1;
        if (recorder) recorder(rep);
    }
    return res;
}

SimulationResult simulate(const MechanicalModel& model, const Vector& q0, const Vector& v0, const IntegratorConfig& cfg,
                          double t_end, const Recorder& recorder) {
    return simulate_from(model, initial_state(model, q0, v0, cfg), cfg, t_end, recorder);
}

}  // namespace nsmbs
