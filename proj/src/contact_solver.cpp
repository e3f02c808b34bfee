#include "nsmbs/contact_solver.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>

namespace nsmbs {

double prox_nonneg(double x) { return x > 0.0 ? x : 0.0; }

double prox_interval(double x, double bound) {
    if (bound < 0.0) throw Error("prox_interval: negative bound");
    return std::clamp(x, -bound, bound);
}

EffectiveOperator::EffectiveOperator(const Matrix& A, const char* name) {
    if (A.rows() != A.cols() || A.rows() == 0) throw Error(std::string(name) + ": not a square matrix");
    lu_.compute(A);
    rcond_ = lu_.rcond();
    if (!(rcond_ > 1e-15)) {
        std::ostringstream os;
        os << name << " is singular (reciprocal condition estimate " << rcond_ << ")";
        throw Error(os.str());
    }
}

SolveContext build_context(const Matrix& W_N, const Matrix& W_T, const EffectiveOperator& op,
                           const Vector& base_velocity, const Vector& mu, double scale, double r,
                           IndexSet active) {
    const auto m = W_N.cols();
    if (W_T.cols() != m || mu.size() != m) throw Error("build_context: active sizes differ");
    SolveContext ctx;
    ctx.active = std::move(active);
    const Matrix XN = op.solve(W_N);
    const Matrix XT = op.solve(W_T);
    ctx.G_NN = W_N.transpose() * XN;
    ctx.G_NT = W_N.transpose() * XT;
    ctx.G_TN = W_T.transpose() * XN;
    ctx.G_TT = W_T.transpose() * XT;
    ctx.F_N = W_N.transpose() * base_velocity;
    ctx.F_T = W_T.transpose() * base_velocity;
    ctx.mu = mu;
    ctx.scale = scale;
    ctx.r = r;
    return ctx;
}

namespace {

struct Gaps {
    Vector gN, gT;
};

Gaps gap_velocities(const SolveContext& ctx, const Vector& lN, const Vector& lT, const Vector& shift_N,
                    const Vector& shift_T) {
    const double s = ctx.scale;
    return {ctx.F_N + s * (ctx.G_NN * lN + ctx.G_NT * lT) + shift_N,
            ctx.F_T + s * (ctx.G_TN * lN + ctx.G_TT * lT) + shift_T};
}

// lambda - prox(lambda - r g) written without the cancellation of the direct form
double normal_residual(double l, double rg) { return std::min(l, rg); }

double tangential_residual(double l, double rg, double bound) {
    const double x = l - rg;
    if (x > bound) return l - bound;
    if (x < -bound) return l + bound;
    return rg;
}

// prox step per row; the nominal solve uses the scalar ctx.r everywhere
struct Steps {
    Vector rN, rT;

    static Steps uniform(int m, double r) { return {Vector::Constant(m, r), Vector::Constant(m, r)}; }
};

Vector residual_from(const SolveContext& ctx, const Vector& lN, const Vector& lT, const Gaps& g, const Steps& r) {
    const int m = ctx.size();
    Vector f(2 * m);
    for (int k = 0; k < m; ++k) {
        f[k] = normal_residual(lN[k], r.rN[k] * g.gN[k]);
        f[m + k] = tangential_residual(lT[k], r.rT[k] * g.gT[k], ctx.mu[k] * std::abs(lN[k]));
    }
    return f;
}

}  // namespace

Vector prox_residual(const SolveContext& ctx, const Vector& lN, const Vector& lT,
                     const Vector& shift_N, const Vector& shift_T, double r) {
    return residual_from(ctx, lN, lT, gap_velocities(ctx, lN, lT, shift_N, shift_T), Steps::uniform(ctx.size(), r));
}

namespace {

Matrix jacobian(const SolveContext& ctx, const Vector& lN, const Vector& lT, const Gaps& g, const Steps& r,
                bool slip_coupling) {
    const int m = ctx.size();
    const double s = ctx.scale;
    Matrix J = Matrix::Zero(2 * m, 2 * m);
    for (int k = 0; k < m; ++k) {
        // Theta_N = 1: f_N = r g_N
        if (lN[k] - r.rN[k] * g.gN[k] >= 0.0) {
            J.row(k).head(m) = r.rN[k] * s * ctx.G_NN.row(k);
            J.row(k).tail(m) = r.rN[k] * s * ctx.G_NT.row(k);
        } else {
            J(k, k) = 1.0;
        }
        const double bound = ctx.mu[k] * std::abs(lN[k]);
        const double x = lT[k] - r.rT[k] * g.gT[k];
        if (std::abs(x) <= bound) {
            J.row(m + k).head(m) = r.rT[k] * s * ctx.G_TN.row(k);
            J.row(m + k).tail(m) = r.rT[k] * s * ctx.G_TT.row(k);
        } else {
            J(m + k, m + k) = 1.0;
            if (slip_coupling && lN[k] != 0.0)
                J(m + k, k) = -(x > 0.0 ? 1.0 : -1.0) * ctx.mu[k] * (lN[k] > 0.0 ? 1.0 : -1.0);
        }
    }
    return J;
}

Vector pinv_solve(const Matrix& J, const Vector& f) {
    Eigen::JacobiSVD<Matrix> svd(J, Eigen::ComputeFullU | Eigen::ComputeFullV);
    svd.setThreshold(1e-12);
    return svd.solve(f);
}

// Newton on the residual with step sizes r; convergence is judged on the nominal residual
bool gauss_newton(const SolveContext& ctx, const Vector& shift_N, const Vector& shift_T, const Steps& r,
                  const SolverSettings& st, ProxSolution& out, int& total_iter) {
    const int m = ctx.size();
    const Steps nominal = Steps::uniform(m, ctx.r);
    Vector lN = Vector::Zero(m), lT = Vector::Zero(m);
    Gaps g = gap_velocities(ctx, lN, lT, shift_N, shift_T);
    Vector f = residual_from(ctx, lN, lT, g, r);
    double res = f.norm();
    double nom = residual_from(ctx, lN, lT, g, nominal).norm();
    std::deque<double> history{res};
    if (out.lambda_N.size() != m || nom < out.residual) {
        out.lambda_N = lN;
        out.lambda_T = lT;
        out.residual = nom;
    }

    for (int it = 0; it < st.max_iter; ++it) {
        const Vector step = pinv_solve(jacobian(ctx, lN, lT, g, r, st.slip_coupling), f);
        ++total_iter;
        if (!step.allFinite())
            throw ContactSolverError("contact solver: NaN in iterate", out.residual, total_iter);
        const bool converged = nom <= st.tol;
        // backtracking on |f|; the full step is kept if nothing shorter does better
        Vector nN, nT, nf;
        Gaps ng;
        double nres = 0.0;
        for (double a = 1.0;; a *= 0.5) {
            nN = lN - a * step.head(m);
            nT = lT - a * step.tail(m);
            ng = gap_velocities(ctx, nN, nT, shift_N, shift_T);
            nf = residual_from(ctx, nN, nT, ng, r);
            nres = nf.norm();
            if (nres <= (1.0 - 1e-4 * a) * res || a < 1e-3 || converged) break;
        }
        const double nnom = residual_from(ctx, nN, nT, ng, nominal).norm();
        if (converged) {
            // one more step only polishes, kept if it does not hurt
            if (nnom <= out.residual) {
                out.lambda_N = nN;
                out.lambda_T = nT;
                out.residual = nnom;
            }
            return true;
        }
        lN = nN;
        lT = nT;
        g = ng;
        f = nf;
        res = nres;
        nom = nnom;
        if (nom < out.residual) {
            out.lambda_N = lN;
            out.lambda_T = lT;
            out.residual = nom;
        }
        if (nom <= st.tol) continue;
        history.push_back(res);
        if (history.size() > 11) history.pop_front();
        if (history.size() == 11 && res > (1.0 - 1e-3) * history.front()) return false;
    }
    return out.residual <= st.tol;
}

// step sizes 1 / (scale * diag G), the natural prox scaling of each row
Steps delassus_steps(const SolveContext& ctx) {
    const int m = ctx.size();
    Steps r = Steps::uniform(m, ctx.r);
    for (int k = 0; k < m; ++k) {
        const double dN = ctx.scale * ctx.G_NN(k, k), dT = ctx.scale * ctx.G_TT(k, k);
        if (dN > 0.0) r.rN[k] = 1.0 / dN;
        if (dT > 0.0) r.rT[k] = 1.0 / dT;
    }
    return r;
}

}  // namespace

ProxSolution solve_prox(const SolveContext& ctx, const Vector& shift_N, const Vector& shift_T,
                        const SolverSettings& settings) {
    ProxSolution sol;
    if (ctx.size() == 0) return sol;
    int total = 0;
    // r, then r / 2 from lambda = 0, then Delassus-scaled steps as a last resort
    const Steps attempts[] = {Steps::uniform(ctx.size(), ctx.r), Steps::uniform(ctx.size(), 0.5 * ctx.r),
                              delassus_steps(ctx)};
    for (const Steps& r : attempts) {
        if (gauss_newton(ctx, shift_N, shift_T, r, settings, sol, total)) {
            sol.iterations = total;
            return sol;
        }
    }
    std::ostringstream os;
    os << "contact solver did not converge (best residual " << sol.residual << " after " << total
       << " iterations)";
    throw ContactSolverError(os.str(), sol.residual, total);
}

namespace {

void scatter(const ProxSolution& sol, const IndexSet& active, int n, Vector& N, Vector& T) {
    N = Vector::Zero(n);
    T = Vector::Zero(n);
    for (std::size_t j = 0; j < active.size(); ++j) {
        N[active[j]] = sol.lambda_N[static_cast<Eigen::Index>(j)];
        T[active[j]] = sol.lambda_T[static_cast<Eigen::Index>(j)];
    }
}

}  // namespace

ContactForces solve_contact_forces(const SolveContext& ctx, int n_contacts, const SolverSettings& settings) {
    const Vector zero = Vector::Zero(ctx.size());
    const ProxSolution sol = solve_prox(ctx, zero, zero, settings);
    ContactForces out;
    scatter(sol, ctx.active, n_contacts, out.lambda_N, out.lambda_T);
    out.active = ctx.active;
    out.iterations = sol.iterations;
    out.residual = sol.residual;
    return out;
}

ImpulseForces solve_impulses(const SolveContext& ctx, const Vector& eps_N, const Vector& eps_T,
                             int n_contacts, const SolverSettings& settings) {
    if (eps_N.size() != ctx.size() || eps_T.size() != ctx.size())
        throw Error("solve_impulses: restitution vectors do not match the active set");
    const Vector shift_N = eps_N.cwiseProduct(ctx.F_N);
    const Vector shift_T = eps_T.cwiseProduct(ctx.F_T);
    const ProxSolution sol = solve_prox(ctx, shift_N, shift_T, settings);
    ImpulseForces out;
    scatter(sol, ctx.active, n_contacts, out.Lambda_N, out.Lambda_T);
    out.active = ctx.active;
    out.iterations = sol.iterations;
    out.residual = sol.residual;
    return out;
}

Vector apply_impulse(const Matrix& M, const Vector& v_minus, const Matrix& W_N, const Matrix& W_T,
                     const ImpulseForces& imp) {
    if (imp.Lambda_N.isZero(0.0) && imp.Lambda_T.isZero(0.0)) return v_minus;
    EffectiveOperator op(M, "mass matrix");
    return v_minus + op.solve(Vector(W_N * imp.Lambda_N + W_T * imp.Lambda_T));
}

}  // namespace nsmbs
