#include "common.hpp"

namespace nsmbs {

namespace {

struct EDCoefficients {
    double c[16];
};

EDCoefficients ed_coefficients(const EDParams& p, double dt) {
    const double al = p.alpha, ar = p.alpha_AR;
    const double den = dt * ar * (al + 1.0);
    EDCoefficients k{};
    double* c = k.c;
    c[1] = 1.0;
    c[2] = dt / 2.0;
    c[3] = dt / 2.0;
    c[4] = 2.0 * ar * al / den;
    c[5] = 2.0 * (0.5 - ar * al) / den;
    c[6] = -1.0 / den;
    c[7] = dt * ar * (1.0 - al) / den;
    c[8] = -dt * ar;
    c[9] = 1.0;
    c[10] = dt * ar * al;
    c[11] = dt * ar * (1.0 - al);
    c[12] = 1.0 / den;
    c[13] = -2.0 * (0.5 + ar) / den;
    c[14] = -dt * ar * (1.0 - al) / den;
    c[15] = 2.0 * ar / den;
    return k;
}

}  // namespace

StepReport step_ed_alpha(const MechanicalModel& model, const GeneralizedState& s, const IntegratorConfig& cfg) {
    const EDParams p = cfg.ed_resolved();
    if (!(p.alpha_AR > 0.0) || p.alpha == -1.0)
        throw Error("ED-alpha: the velocity-based stage elimination needs alpha_AR > 0 and alpha != -1");
    const double dt = cfg.dt;
    const EDCoefficients coef = ed_coefficients(p, dt);
    const double* c = coef.c;
    const Vector& qi = s.q;
    const Vector& vi = s.v_plus;
    const Vector& ai = s.a;
    const Eigen::Index n = qi.size();
    const int m = model.n_contacts();

    // index p: end of step, index j: stage
    Vector qp = qi, vp = vi, qj = qi, vj = vi, ap = ai, aj = ai;
    detail::ActiveContacts act;
    ContactForces f_stage = detail::empty_forces(m), f_end = detail::empty_forces(m);
    int it = 0;
    detail::FixedPointMonitor monitor(cfg.fp_tol);
    for (;;) {
        if (it == cfg.fp_max_iter) detail::fp_failure("ED-alpha", s, it);
        const SystemEvaluation ep = model.evaluate(qp, vp);
        const SystemEvaluation ej = it == 0 ? ep : model.evaluate(qj, vj);
        if (it == 0) act = detail::select_active(model, ep.g_N);
        ++it;

        Matrix Mc(2 * n, 2 * n);
        Mc.topLeftCorner(n, n) = c[4] * ep.M + ep.C + c[3] * ep.K;
        Mc.topRightCorner(n, n) = c[6] * ep.M + c[2] * ep.K;
        Mc.bottomLeftCorner(n, n) = c[15] * ej.M + c[8] * ej.K;
        Mc.bottomRightCorner(n, n) = c[12] * ej.M + ej.C + c[10] * ej.K;
        Vector Rc(2 * n);
        Rc.head(n) = ep.h - c[5] * (ep.M * vi) - c[7] * (ep.M * ai) - c[1] * (ep.K * qi);
        Rc.tail(n) = ej.h - c[13] * (ej.M * vi) - c[14] * (ej.M * ai) - c[9] * (ej.K * qi) - c[11] * (ej.K * vi);
        const EffectiveOperator op(Mc, "ED-alpha coupled matrix");
        const Vector vc_free = op.solve(Rc);

        Vector vc;
        if (act.empty()) {
            vc = vc_free;
        } else {
            const auto k = static_cast<Eigen::Index>(act.idx.size());
            const Matrix WNp = restrict_columns(ep.W_N, act.idx), WTp = restrict_columns(ep.W_T, act.idx);
            const Matrix WNj = restrict_columns(ej.W_N, act.idx), WTj = restrict_columns(ej.W_T, act.idx);
            Matrix WN = Matrix::Zero(2 * n, 2 * k), WT = Matrix::Zero(2 * n, 2 * k);
            WN.topLeftCorner(n, k) = WNp;
            WN.bottomRightCorner(n, k) = WNj;
            WT.topLeftCorner(n, k) = WTp;
            WT.bottomRightCorner(n, k) = WTj;
            Vector mu(2 * k);
            mu << act.mu, act.mu;
            IndexSet doubled(act.idx);
            for (int id : act.idx) doubled.push_back(id + m);
            const SolveContext ctx = build_context(WN, WT, op, vc_free, mu, 1.0, cfg.r_force, doubled);
            const ContactForces both = solve_contact_forces(ctx, 2 * m, cfg.solver);
            vc = op.solve(Vector(Rc + WN * restrict_entries(both.lambda_N, doubled) +
                                 WT * restrict_entries(both.lambda_T, doubled)));
            f_end.lambda_N = both.lambda_N.head(m);
            f_end.lambda_T = both.lambda_T.head(m);
            f_stage.lambda_N = both.lambda_N.tail(m);
            f_stage.lambda_T = both.lambda_T.tail(m);
            f_end.active = f_stage.active = act.idx;
            f_end.iterations = f_stage.iterations = both.iterations;
            f_end.residual = f_stage.residual = both.residual;
        }

        const Vector vp_new = vc.head(n);
        const Vector vj_new = vc.tail(n);
        qp = c[1] * qi + c[2] * vj_new + c[3] * vp_new;
        ap = c[4] * vp_new + c[5] * vi + c[6] * vj_new + c[7] * ai;
        qj = c[8] * vp_new + c[9] * qi + c[10] * vj_new + c[11] * vi;
        aj = c[12] * vj_new + c[13] * vi + c[14] * ai + c[15] * vp_new;
        const bool done = monitor.done(std::hypot((vp_new - vp).norm(), (vj_new - vj).norm()),
                                       std::hypot(vp_new.norm(), vj_new.norm()));
        vp = vp_new;
        vj = vj_new;
        if (done) break;
    }

    StepReport rep;
    rep.state.t = s.t + dt;
    rep.state.q = qp;
    rep.state.v_minus = vp;
    rep.state.v_plus = vp;
    rep.state.a = ap;
    rep.state.A = ap;
    rep.forces.push_back(std::move(f_stage));
    rep.forces.push_back(std::move(f_end));
    rep.fp_iterations = it;
    return rep;
}

}  // namespace nsmbs
