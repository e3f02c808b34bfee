#include "common.hpp"

namespace nsmbs {

StepReport step_bathe(const MechanicalModel& model, const GeneralizedState& s, const IntegratorConfig& cfg) {
    const double dt = cfg.dt;
    const Vector& qi = s.q;
    const Vector& vi = s.v_plus;
    const Vector& ai = s.a;
    StepReport rep;
    int total = 0;

    // first sub-step, trapezoidal rule over dt/2
    Vector qh = qi, vh = vi, ah = ai;
    {
        detail::ActiveContacts act;
        ContactForces forces;
        int it = 0;
        detail::FixedPointMonitor monitor(cfg.fp_tol);
        for (;;) {
            if (it == cfg.fp_max_iter) detail::fp_failure("Bathe (first sub-step)", s, it);
            const SystemEvaluation ev = model.evaluate(qh, vh);
            if (it == 0) act = detail::select_active(model, ev.g_N);
            ++it;
            const Matrix K1 = 16.0 / (dt * dt) * ev.M + 4.0 / dt * ev.C + ev.K;
            const Vector R1 = ev.h + ev.M * (16.0 / (dt * dt) * qi + 8.0 / dt * vi + ai) + ev.C * (4.0 / dt * qi + vi);
            const EffectiveOperator op(K1, "Bathe first sub-step matrix");
            const Vector q_free = op.solve(R1);
            const Vector u0 = -vi - 4.0 / dt * qi + 4.0 / dt * q_free;
            forces = detail::stage_forces(model, ev, act, op, u0, 4.0 / dt, cfg);
            qh = act.empty() ? q_free : op.solve(Vector(R1 + ev.W_N * forces.lambda_N + ev.W_T * forces.lambda_T));
            const Vector v_new = -vi + 4.0 / dt * (qh - qi);
            ah = -ai + 4.0 / dt * (v_new - vi);
            const bool done = monitor.done(v_new, vh);
            vh = v_new;
            if (done) break;
        }
        total += it;
        rep.forces.push_back(std::move(forces));
    }

    // second sub-step, three-point backward Euler
    Vector q = qh, v = vh, a = ah;
    {
        detail::ActiveContacts act;
        ContactForces forces;
        int it = 0;
        detail::FixedPointMonitor monitor(cfg.fp_tol);
        for (;;) {
            if (it == cfg.fp_max_iter) detail::fp_failure("Bathe (second sub-step)", s, it);
            const SystemEvaluation ev = model.evaluate(q, v);
            if (it == 0) act = detail::select_active(model, ev.g_N);
            ++it;
            const Matrix K2 = 9.0 / (dt * dt) * ev.M + 3.0 / dt * ev.C + ev.K;
            const Vector R2 = ev.h +
                              ev.M * (12.0 / (dt * dt) * qh - 3.0 / (dt * dt) * qi + 4.0 / dt * vh - 1.0 / dt * vi) +
                              ev.C * (4.0 / dt * qh - 1.0 / dt * qi);
            const EffectiveOperator op(K2, "Bathe second sub-step matrix");
            const Vector q_free = op.solve(R2);
            const Vector u0 = qi / dt - 4.0 / dt * qh + 3.0 / dt * q_free;
            forces = detail::stage_forces(model, ev, act, op, u0, 3.0 / dt, cfg);
            q = act.empty() ? q_free : op.solve(Vector(R2 + ev.W_N * forces.lambda_N + ev.W_T * forces.lambda_T));
            const Vector v_new = (qi - 4.0 * qh + 3.0 * q) / dt;
            a = (vi - 4.0 * vh + 3.0 * v_new) / dt;
            const bool done = monitor.done(v_new, v);
            v = v_new;
            if (done) break;
        }
        total += it;
        rep.forces.push_back(std::move(forces));
    }

    rep.state.t = s.t + dt;
    rep.state.q = q;
    rep.state.v_minus = v;
    rep.state.v_plus = v;
    rep.state.a = a;
    rep.state.A = a;
    rep.fp_iterations = total;
    return rep;
}

}  // namespace nsmbs
