#pragma once

#include "nsmbs/core_model.hpp"

#include <Eigen/LU>

namespace nsmbs {

class ContactSolverError : public Error {
public:
    ContactSolverError(const std::string& what, double best_residual, int iterations)
        : Error(what), best_residual(best_residual), iterations(iterations) {}
    double best_residual;
    int iterations;
};

double prox_nonneg(double x);
double prox_interval(double x, double bound);

struct ContactForces {
    Vector lambda_N, lambda_T;
    IndexSet active;
    int iterations = 0;
    double residual = 0.0;
};

struct ImpulseForces {
    Vector Lambda_N, Lambda_T;
    IndexSet active;
    int iterations = 0;
    double residual = 0.0;
};

// gap velocities of the active contacts are  g = F + scale * G * lambda
struct SolveContext {
    IndexSet active;
    Matrix G_NN, G_NT, G_TN, G_TT;
    Vector F_N, F_T;
    Vector mu;
    double scale = 1.0;
    double r = 0.1;

    int size() const { return static_cast<int>(F_N.size()); }
};

struct SolverSettings {
    double tol = 1e-10;
    int max_iter = 100;
    // adds d f_T / d lambda_N on slipping contacts; false gives the plain Heaviside form
    bool slip_coupling = true;
};

// LU factorization of an effective iteration matrix with a conditioning check
class EffectiveOperator {
public:
    explicit EffectiveOperator(const Matrix& A, const char* name = "effective matrix");
    Vector solve(const Vector& b) const { return lu_.solve(b); }
    Matrix solve(const Matrix& B) const { return lu_.solve(B); }
    double rcond() const { return rcond_; }
    Eigen::Index rows() const { return lu_.rows(); }

private:
    Eigen::PartialPivLU<Matrix> lu_;
    double rcond_ = 0.0;
};

// W_N, W_T hold the active columns only; base_velocity is the generalized velocity
// reached with zero contact forces, so that v = base_velocity + scale * op^{-1} W lambda
SolveContext build_context(const Matrix& W_N, const Matrix& W_T, const EffectiveOperator& op,
                           const Vector& base_velocity, const Vector& mu, double scale, double r,
                           IndexSet active);

struct ProxSolution {
    Vector lambda_N, lambda_T;
    int iterations = 0;
    double residual = 0.0;
};

// prox residual with the impact shift added to the normal and tangential arguments
Vector prox_residual(const SolveContext& ctx, const Vector& lambda_N, const Vector& lambda_T,
                     const Vector& shift_N, const Vector& shift_T, double r);

ProxSolution solve_prox(const SolveContext& ctx, const Vector& shift_N, const Vector& shift_T,
                        const SolverSettings& settings);

ContactForces solve_contact_forces(const SolveContext& ctx, int n_contacts,
                                   const SolverSettings& settings = {});

// ctx must be built with the plain mass matrix, scale 1 and base velocity v_minus,
// so that ctx.F_N / ctx.F_T are the pre-impact gap velocities
ImpulseForces solve_impulses(const SolveContext& ctx, const Vector& eps_N, const Vector& eps_T,
                             int n_contacts, const SolverSettings& settings = {});

Vector apply_impulse(const Matrix& M, const Vector& v_minus, const Matrix& W_N, const Matrix& W_T,
                     const ImpulseForces& impulses);

}  // namespace nsmbs
