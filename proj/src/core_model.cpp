#include "nsmbs/core_model.hpp"
#include "nsmbs/contact_solver.hpp"

#include <Eigen/Cholesky>
#include <cmath>

namespace nsmbs {

void SystemEvaluation::validate() const {
    const auto n = M.rows();
    if (M.cols() != n || C.rows() != n || C.cols() != n || K.rows() != n || K.cols() != n ||
        h.size() != n)
        throw Error("system evaluation: inconsistent matrix sizes");
    if (W_N.rows() != n || W_T.rows() != n)
        throw Error("system evaluation: force directions have wrong row count");
    if (W_N.cols() != g_N.size() || W_T.cols() != g_T.size())
        throw Error("system evaluation: force directions do not match gap count");
    const double scale = std::max(M.cwiseAbs().maxCoeff(), 1e-300);
    if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw Error("system evaluation: mass matrix not symmetric");
    Eigen::LLT<Matrix> llt(M);
    if (llt.info() != Eigen::Success) throw Error("system evaluation: mass matrix not positive definite");
}

ContactParameters ContactParameters::uniform(int m, double eps_N, double eps_T, double mu) {
    ContactParameters p;
    p.eps_N = Vector::Constant(m, eps_N);
    p.eps_T = Vector::Constant(m, eps_T);
    p.mu = Vector::Constant(m, mu);
    p.validate();
    return p;
}

void ContactParameters::validate() const {
    if (eps_T.size() != eps_N.size() || mu.size() != eps_N.size())
        throw Error("contact parameters: length mismatch");
    for (Eigen::Index k = 0; k < eps_N.size(); ++k) {
        if (!(eps_N[k] >= 0.0 && eps_N[k] <= 1.0) || !(eps_T[k] >= 0.0 && eps_T[k] <= 1.0))
            throw Error("contact parameters: restitution outside [0,1]");
        if (!(mu[k] >= 0.0)) throw Error("contact parameters: negative friction coefficient");
    }
}

Vector MechanicalModel::normal_gaps(const Vector& q) const {
    return evaluate(q, Vector::Zero(q.size())).g_N;
}

std::string MechanicalModel::dof_name(int i) const { return std::to_string(i + 1); }

double MechanicalModel::elastic_energy(const Vector&) const { return 0.0; }
double MechanicalModel::potential_energy(const Vector&) const { return 0.0; }

IndexSet active_set(const Vector& g_N) {
    IndexSet out;
    for (Eigen::Index k = 0; k < g_N.size(); ++k)
        if (g_N[k] <= 0.0) out.push_back(static_cast<int>(k));
    return out;
}

IndexSet newly_closed(const Vector& g_N_prev, const Vector& g_N_next) {
    if (g_N_prev.size() != g_N_next.size()) throw Error("newly_closed: gap vectors differ in length");
    IndexSet out;
    for (Eigen::Index k = 0; k < g_N_prev.size(); ++k)
        if (g_N_prev[k] > 0.0 && g_N_next[k] <= 0.0) out.push_back(static_cast<int>(k));
    return out;
}

Matrix restrict_columns(const Matrix& W, const IndexSet& idx) {
    Matrix out(W.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t j = 0; j < idx.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = W.col(idx[j]);
    return out;
}

Vector restrict_entries(const Vector& x, const IndexSet& idx) {
    Vector out(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t j = 0; j < idx.size(); ++j) out[static_cast<Eigen::Index>(j)] = x[idx[j]];
    return out;
}

Vector initial_acceleration(const MechanicalModel& model, const Vector& q0, const Vector& v0,
                            const InitialAccelerationOptions& opts) {
    const SystemEvaluation ev = model.evaluate(q0, v0);
    const Vector rhs = ev.h - ev.K * q0 - ev.C * v0;
    EffectiveOperator op(ev.M, "mass matrix");
    Vector a0 = op.solve(rhs);
    if (!opts.include_contact_forces) return a0;

    const IndexSet act = active_set(ev.g_N);
    if (act.empty()) return a0;
    const Matrix WN = restrict_columns(ev.W_N, act);
    const Matrix WT = restrict_columns(ev.W_T, act);
    const Vector mu = restrict_entries(model.contact_parameters().mu, act);
    const SolveContext ctx =
        build_context(WN, WT, op, Vector(v0 + opts.tau * a0), mu, opts.tau, opts.r, act);
    const ContactForces f = solve_contact_forces(ctx, model.n_contacts());
    return op.solve(Vector(rhs + ev.W_N * f.lambda_N + ev.W_T * f.lambda_T));
}

}  // namespace nsmbs
