#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace nsmbs {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using IndexSet = std::vector<int>;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct GeneralizedState {
    double t = 0.0;
    Vector q;
    Vector v_minus;
    Vector v_plus;
    Vector a;
    // auxiliary acceleration of generalized-alpha, equals a for the other schemes
    Vector A;

    Eigen::Index size() const { return q.size(); }
};

struct SystemEvaluation {
    Matrix M, C, K;
    Vector h;
    Matrix W_N, W_T;
    Vector g_N, g_T;

    // throws on inconsistent sizes or an asymmetric / indefinite mass matrix
    void validate() const;
};

struct ContactParameters {
    Vector eps_N, eps_T, mu;

    static ContactParameters uniform(int m, double eps_N, double eps_T, double mu);
    void validate() const;
};

class MechanicalModel {
public:
    virtual ~MechanicalModel() = default;

    virtual int n_dof() const = 0;
    virtual int n_contacts() const = 0;
    virtual SystemEvaluation evaluate(const Vector& q, const Vector& v) const = 0;
    virtual const ContactParameters& contact_parameters() const = 0;

    virtual Vector normal_gaps(const Vector& q) const;
    virtual std::string dof_name(int i) const;

    // energies used by the diagnostics; zero unless the model knows better
    virtual double elastic_energy(const Vector& q) const;
    virtual double potential_energy(const Vector& q) const;
};

IndexSet active_set(const Vector& g_N);
IndexSet newly_closed(const Vector& g_N_prev, const Vector& g_N_next);

struct InitialAccelerationOptions {
    bool include_contact_forces = true;
    double r = 0.1;
    // closed contacts are resolved on the gap velocities reached after tau
    double tau = 1e-6;
};

Vector initial_acceleration(const MechanicalModel& model, const Vector& q0, const Vector& v0,
                            const InitialAccelerationOptions& opts = {});

// columns of W restricted to the given contact indices
Matrix restrict_columns(const Matrix& W, const IndexSet& idx);
Vector restrict_entries(const Vector& x, const IndexSet& idx);

}  // namespace nsmbs
