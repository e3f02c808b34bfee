#include "common.hpp"

namespace nsmbs {

StepReport step_moreau(const MechanicalModel& model, const GeneralizedState& s, const IntegratorConfig& cfg) {
    const double dt = cfg.dt;
    const Vector& vi = s.v_plus;
    const Vector qm = s.q + 0.5 * dt * vi;
    const SystemEvaluation ev = model.evaluate(qm, vi);
    const detail::ActiveContacts act = detail::select_active(model, ev.g_N);
    const EffectiveOperator op(ev.M, "mass matrix");
    const Vector v_free = vi + dt * op.solve(Vector(ev.h - ev.C * vi - ev.K * qm));

    const int m = model.n_contacts();
    ContactForces forces = detail::empty_forces(m);
    Vector v = v_free;
    if (!act.empty()) {
        const Matrix WN = restrict_columns(ev.W_N, act.idx), WT = restrict_columns(ev.W_T, act.idx);
        SolveContext ctx = build_context(WN, WT, op, v_free, act.mu, 1.0, cfg.impulse_r(), act.idx);
        // impact law shift uses the gap velocities at the beginning of the step
        const ContactParameters& cp = model.contact_parameters();
        const Vector shift_N = restrict_entries(cp.eps_N, act.idx).cwiseProduct(WN.transpose() * vi);
        const Vector shift_T = restrict_entries(cp.eps_T, act.idx).cwiseProduct(WT.transpose() * vi);
        const ProxSolution sol = solve_prox(ctx, shift_N, shift_T, cfg.solver);
        v = v_free + op.solve(Vector(WN * sol.lambda_N + WT * sol.lambda_T));
        forces.active = act.idx;
        for (std::size_t j = 0; j < act.idx.size(); ++j) {
            forces.lambda_N[act.idx[j]] = sol.lambda_N[static_cast<Eigen::Index>(j)] / dt;
            forces.lambda_T[act.idx[j]] = sol.lambda_T[static_cast<Eigen::Index>(j)] / dt;
        }
        forces.iterations = sol.iterations;
        forces.residual = sol.residual;
    }

    StepReport rep;
    rep.state.t = s.t + dt;
    rep.state.q = qm + 0.5 * dt * v;
    rep.state.v_minus = v;
    rep.state.v_plus = v;
    rep.state.a = (v - vi) / dt;
    rep.state.A = rep.state.a;
    rep.forces.push_back(std::move(forces));
    rep.fp_iterations = 1;
    return rep;
}

}  // namespace nsmbs
