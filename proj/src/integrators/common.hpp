#pragma once

#include "nsmbs/integrators.hpp"

#include <cmath>
#include <limits>

namespace nsmbs::detail {

struct ActiveContacts {
    IndexSet idx;
    Vector mu;

    bool empty() const { return idx.empty(); }
};

inline ActiveContacts select_active(const MechanicalModel& model, const Vector& g_N) {
    ActiveContacts a;
    a.idx = active_set(g_N);
    a.mu = restrict_entries(model.contact_parameters().mu, a.idx);
    return a;
}

// converged below tol, or stalled at the roundoff floor of a stiff solve
class FixedPointMonitor {
public:
    explicit FixedPointMonitor(double tol) : tol_(tol) {}

    bool done(double change, double size) {
        const double bound = tol_ * (1.0 + size);
        const bool stalled = change >= prev_ && change < 1e3 * bound;
        prev_ = change;
        return change < bound || stalled;
    }
    bool done(const Vector& v_new, const Vector& v_old) { return done((v_new - v_old).norm(), v_new.norm()); }

private:
    double tol_;
    double prev_ = std::numeric_limits<double>::infinity();
};

inline ContactForces empty_forces(int m) {
    ContactForces f;
    f.lambda_N = Vector::Zero(m);
    f.lambda_T = Vector::Zero(m);
    return f;
}

// contact solve for a single stage: v = u0 + scale * op^{-1} W lambda
inline ContactForces stage_forces(const MechanicalModel& model, const SystemEvaluation& ev,
                                  const ActiveContacts& act, const EffectiveOperator& op, const Vector& u0,
                                  double scale, const IntegratorConfig& cfg) {
    if (act.empty()) return empty_forces(model.n_contacts());
    const SolveContext ctx = build_context(restrict_columns(ev.W_N, act.idx), restrict_columns(ev.W_T, act.idx),
                                           op, u0, act.mu, scale, cfg.r_force, act.idx);
    return solve_contact_forces(ctx, model.n_contacts(), cfg.solver);
}

[[noreturn]] inline void fp_failure(const char* scheme, const GeneralizedState& s, int iters) {
    throw IntegrationError(std::string(scheme) + ": fixed-point iteration did not converge in " +
                               std::to_string(iters) + " iterations",
                           -1, s.t);
}

}  // namespace nsmbs::detail
