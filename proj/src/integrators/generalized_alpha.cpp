#include "common.hpp"

namespace nsmbs {

StepReport step_generalized_alpha(const MechanicalModel& model, const GeneralizedState& s,
                                  const IntegratorConfig& cfg) {
    const GAlphaParams p = cfg.galpha_resolved();
    const double dt = cfg.dt, am = p.alpha_m, af = p.alpha_f, g = p.gamma, b = p.beta;
    const double w = (1.0 - af) / (1.0 - am);
    const double scale = dt * g * w;
    const Vector& qi = s.q;
    const Vector& vi = s.v_plus;
    const Vector& ai = s.a;
    const Vector& Ai = s.A;

    Vector q = qi, v = vi, a = ai, A = Ai;
    detail::ActiveContacts act;
    ContactForces forces;
    int it = 0;
    detail::FixedPointMonitor monitor(cfg.fp_tol);
    for (;;) {
        if (it == cfg.fp_max_iter) detail::fp_failure("generalized-alpha", s, it);
        const SystemEvaluation ev = model.evaluate(q, v);
        if (it == 0) act = detail::select_active(model, ev.g_N);
        ++it;

        const Matrix Mhat = ev.M + dt * g * w * ev.C + dt * dt * b * w * ev.K;
        const Vector Rhat = ev.h - ev.C * vi - (dt * (1.0 - g) - dt * g * am / (1.0 - am)) * (ev.C * Ai) -
                            dt * g * af / (1.0 - am) * (ev.C * ai) - ev.K * qi - dt * (ev.K * vi) -
                            (dt * dt * (0.5 - b) - dt * dt * b * am / (1.0 - am)) * (ev.K * Ai) -
                            dt * dt * b * af / (1.0 - am) * (ev.K * ai);
        const EffectiveOperator op(Mhat, "generalized-alpha effective mass");
        const Vector a_free = op.solve(Rhat);
        const Vector u0 = vi + dt * (1.0 - g) * Ai + dt * g * (w * a_free + af / (1.0 - am) * ai - am / (1.0 - am) * Ai);
        forces = detail::stage_forces(model, ev, act, op, u0, scale, cfg);

        a = act.empty() ? a_free : op.solve(Vector(Rhat + ev.W_N * forces.lambda_N + ev.W_T * forces.lambda_T));
        A = ((1.0 - af) * a + af * ai - am * Ai) / (1.0 - am);
        const Vector v_new = vi + dt * ((1.0 - g) * Ai + g * A);
        q = qi + dt * vi + dt * dt * ((0.5 - b) * Ai + b * A);
        const bool done = monitor.done(v_new, v);
        v = v_new;
        if (done) break;
    }

    StepReport rep;
    rep.state.t = s.t + dt;
    rep.state.q = q;
    rep.state.v_minus = v;
    rep.state.v_plus = v;
    rep.state.a = a;
    rep.state.A = A;
    rep.forces.push_back(std::move(forces));
    rep.fp_iterations = it;
    return rep;
}

}  // namespace nsmbs
