#pragma once

#include "nsmbs/core_model.hpp"

#include <array>
#include <string>
#include <utility>
#include <vector>

namespace nsmbs::fem {

using Matrix26 = Eigen::Matrix<double, 2, 6>;
using Matrix66 = Eigen::Matrix<double, 6, 6>;
using RowVector6 = Eigen::Matrix<double, 1, 6>;
using Vector2 = Eigen::Vector2d;
using Matrix2 = Eigen::Matrix2d;

// nodes and weights on [0, 1]
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n);

// rows: axial, transverse; columns: (u1, v1, phi1, u2, v2, phi2)
Matrix26 shape_function(double xi, double l);
// strain rows: u' and curvature v''
Matrix26 shape_strain(double xi, double l);

struct BeamElement {
    double x0 = 0.0;  // position of the first node along the undeformed axis
    double l = 0.0;
    double rhoA = 0.0;
    double EA = 0.0;
    double EI = 0.0;
    double thickness = 0.0;  // adds rhoA*l*D^2/12 to I2
};

struct BeamElementData {
    double l = 0.0, rhoA = 0.0, EA = 0.0, EI = 0.0;
    Matrix2 I0;
    Vector2 I1;
    double I2 = 0.0;
    RowVector6 I3, I4;
    Matrix26 S_bar;
    Matrix66 S_tilde, S_ff, K_ff;
};

BeamElementData element_shape_integrals(const BeamElement& e);

enum class BoundaryCondition { TangentialClampedFree, Pinned, ArticulatedFree, Free };

BoundaryCondition parse_boundary_condition(const std::string& s);
std::string boundary_condition_name(BoundaryCondition bc);

// eliminated entries of q_f (size 3 * (n_el + 1))
IndexSet constrained_dofs(BoundaryCondition bc, int n_elements);

enum class CrankGravity { Consistent, Printed };

struct SliderCrankParams {
    double l1 = 0.153, l2 = 0.306;
    double a = 0.05, b = 0.025, c = 0.001;
    double m1 = 0.038, m2 = 0.038, m3 = 0.076;
    double J1 = 7.4e-5, J2 = 5.9e-4, J3 = 2.7e-6;
    double E = 2e11, rho = 7800.0;
    double gamma = 9.81;
    double T_crank = 0.0;
    std::array<double, 4> eps_N{0.4, 0.4, 0.4, 0.4};
    std::array<double, 4> eps_T{0.0, 0.0, 0.0, 0.0};
    std::array<double, 4> mu{0.01, 0.01, 0.01, 0.01};
    int n_elements = 4;
    BoundaryCondition bc = BoundaryCondition::TangentialClampedFree;
    // crank inertia about the joint with factor 1/2 by default; the parallel-axis value is 1/4
    double crank_inertia_factor = 0.5;
    CrankGravity crank_gravity = CrankGravity::Consistent;

    double thickness() const;  // D
    double height() const;     // H
    double area() const;
    double second_moment() const;
    double notch() const { return 2.0 * (b + c); }  // d
    double crank_inertia() const { return J1 + crank_inertia_factor * m1 * l1 * l1; }
    void validate() const;
};

// rod plus slider integrals assembled over the full elastic vector
struct AssembledIntegrals {
    int n_f = 0;
    double mass = 0.0;  // rod + slider
    Vector2 I1;
    double I2 = 0.0;
    Vector I3, I4;  // n_f
    Matrix S_bar;   // 2 x n_f
    Matrix S_tilde, S_ff, K_ff;
    Matrix S_check;  // 2 x n_f, tip displacement selector
    // rod alone, used by the eigenproblem
    Matrix m_ff_rod;
};

AssembledIntegrals assemble_integrals(const SliderCrankParams& p);

// DOFs (theta1, theta2, theta3, eta) with q_f = B eta
class FloatingFrameModel final : public MechanicalModel {
public:
    // elastic basis from the boundary condition in p
    explicit FloatingFrameModel(const SliderCrankParams& p);
    FloatingFrameModel(const SliderCrankParams& p, Matrix basis, std::string coordinate_prefix);

    int n_dof() const override { return 3 + n_e_; }
    int n_contacts() const override { return 4; }
    SystemEvaluation evaluate(const Vector& q, const Vector& v) const override;
    const ContactParameters& contact_parameters() const override { return cp_; }
    Vector normal_gaps(const Vector& q) const override;
    std::string dof_name(int i) const override;
    double elastic_energy(const Vector& q) const override;
    double potential_energy(const Vector& q) const override;

    Matrix mass_matrix(const Vector& q) const;
    Vector quadratic_velocity(const Vector& q, const Vector& v) const;
    Vector external_forces(const Vector& q) const;
    Matrix stiffness_matrix() const;
    std::pair<Vector, Vector> gap_functions(const Vector& q) const;
    std::pair<Matrix, Matrix> force_directions(const Vector& q) const;
    double kinetic_energy(const Vector& q, const Vector& v) const;

    Vector2 slider_center(const Vector& q) const;
    Vector2 slider_velocity(const Vector& q, const Vector& v) const;
    Vector elastic_displacements(const Vector& q) const;  // q_f

    int n_elastic() const { return n_e_; }
    const Matrix& basis() const { return B_; }
    const SliderCrankParams& params() const { return p_; }
    const AssembledIntegrals& integrals() const { return ai_; }

    // reduced elastic blocks B^T S_ff B and B^T K_ff B
    const Matrix& m_ff() const { return Sff_; }
    const Matrix& k_ff() const { return Kff_; }

private:
    void setup(Matrix basis);

    SliderCrankParams p_;
    AssembledIntegrals ai_;
    Matrix B_;
    int n_e_ = 0;
    std::string prefix_;
    ContactParameters cp_;

    Matrix Sbar_, Scheck_, Sff_, Stilde_, Kff_;
    Eigen::RowVectorXd I3_, I4_;
};

// basis selecting the unconstrained entries of q_f
Matrix selection_basis(int n_f, const IndexSet& eliminated);

// q_f identically zero: three DOFs (theta1, theta2, theta3)
FloatingFrameModel rigid_slider_crank(const SliderCrankParams& p);

}  // namespace nsmbs::fem
