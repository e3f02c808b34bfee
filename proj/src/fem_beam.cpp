#include "nsmbs/fem_beam.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace nsmbs::fem {

namespace {

const Matrix2 I_tilde = (Matrix2() << 0.0, 1.0, -1.0, 0.0).finished();

Matrix2 rot(double th) {
    const double c = std::cos(th), s = std::sin(th);
    return (Matrix2() << c, -s, s, c).finished();
}

Matrix2 rot_d(double th) {
    const double c = std::cos(th), s = std::sin(th);
    return (Matrix2() << -s, -c, c, -s).finished();
}

double legendre(int n, double x, double& dp) {
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    return p1;
}

}  // namespace

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
    if (n < 1) throw Error("gauss_legendre: need at least one point");
    std::vector<double> x(n), w(n);
    if (n == 1) return {{0.5}, {1.0}};
    for (int i = 0; i < n; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            const double p = legendre(n, z, dp);
            const double dz = p / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        legendre(n, z, dp);
        x[n - 1 - i] = 0.5 * (1.0 + z);
        w[n - 1 - i] = 1.0 / ((1.0 - z * z) * dp * dp);
    }
    return {x, w};
}

Matrix26 shape_function(double xi, double l) {
    if (!(xi >= 0.0 && xi <= 1.0)) throw Error("shape_function: xi outside [0, 1]");
    const double x2 = xi * xi, x3 = x2 * xi;
    Matrix26 S = Matrix26::Zero();
    S(0, 0) = 1.0 - xi;
    S(0, 3) = xi;
    S(1, 1) = 1.0 - 3.0 * x2 + 2.0 * x3;
    S(1, 2) = l * (xi - 2.0 * x2 + x3);
    S(1, 4) = 3.0 * x2 - 2.0 * x3;
    S(1, 5) = l * (x3 - x2);
    return S;
}

Matrix26 shape_strain(double xi, double l) {
    if (!(xi >= 0.0 && xi <= 1.0)) throw Error("shape_strain: xi outside [0, 1]");
    Matrix26 B = Matrix26::Zero();
    B(0, 0) = -1.0 / l;
    B(0, 3) = 1.0 / l;
    const double s = 1.0 / (l * l);
    B(1, 1) = s * (-6.0 + 12.0 * xi);
    B(1, 2) = s * l * (-4.0 + 6.0 * xi);
    B(1, 4) = s * (6.0 - 12.0 * xi);
    B(1, 5) = s * l * (6.0 * xi - 2.0);
    return B;
}

BeamElementData element_shape_integrals(const BeamElement& e) {
    if (!(e.l > 0.0) || !(e.rhoA > 0.0)) throw Error("element_shape_integrals: length and rhoA must be positive");
    BeamElementData d;
    d.l = e.l;
    d.rhoA = e.rhoA;
    d.EA = e.EA;
    d.EI = e.EI;
    d.I0 = e.rhoA * e.l * Matrix2::Identity();
    d.I1.setZero();
    d.I2 = e.rhoA * e.l * e.thickness * e.thickness / 12.0;
    d.I3.setZero();
    d.I4.setZero();
    d.S_bar.setZero();
    d.S_tilde.setZero();
    d.S_ff.setZero();
    d.K_ff.setZero();

    // degree six at most in the mass integrands
    const auto [xm, wm] = gauss_legendre(4);
    for (std::size_t g = 0; g < xm.size(); ++g) {
        const double x = e.x0 + e.l * xm[g];
        const double dm = e.rhoA * e.l * wm[g];
        const Matrix26 S = shape_function(xm[g], e.l);
        d.I1[0] += dm * x;
        d.I2 += dm * x * x;
        d.I3 += dm * x * S.row(0);
        d.I4 += dm * x * S.row(1);
        d.S_bar += dm * S;
        d.S_ff += dm * S.transpose() * S;
        d.S_tilde += dm * S.transpose() * I_tilde * S;
    }
    const auto [xk, wk] = gauss_legendre(2);
    const Eigen::Matrix2d Cm = (Eigen::Matrix2d() << e.EA, 0.0, 0.0, e.EI).finished();
    for (std::size_t g = 0; g < xk.size(); ++g) {
        const Matrix26 Bs = shape_strain(xk[g], e.l);
        d.K_ff += e.l * wk[g] * Bs.transpose() * Cm * Bs;
    }
    d.S_ff = (0.5 * (d.S_ff + d.S_ff.transpose())).eval();
    d.K_ff = (0.5 * (d.K_ff + d.K_ff.transpose())).eval();
    d.S_tilde = (0.5 * (d.S_tilde - d.S_tilde.transpose())).eval();
    return d;
}

BoundaryCondition parse_boundary_condition(const std::string& s) {
    if (s == "clamped" || s == "tangential" || s == "clamped_free") return BoundaryCondition::TangentialClampedFree;
    if (s == "pinned") return BoundaryCondition::Pinned;
    if (s == "articulated_free") return BoundaryCondition::ArticulatedFree;
    if (s == "free") return BoundaryCondition::Free;
    throw Error("unknown boundary condition '" + s + "'");
}

std::string boundary_condition_name(BoundaryCondition bc) {
    switch (bc) {
        case BoundaryCondition::TangentialClampedFree: return "clamped_free";
        case BoundaryCondition::Pinned: return "pinned";
        case BoundaryCondition::ArticulatedFree: return "articulated_free";
        case BoundaryCondition::Free: return "free";
    }
    return "?";
}

IndexSet constrained_dofs(BoundaryCondition bc, int n_elements) {
    if (n_elements < 1) throw Error("boundary conditions need at least one element");
    switch (bc) {
        case BoundaryCondition::TangentialClampedFree: return {0, 1, 2};
        case BoundaryCondition::Pinned: return {0, 1, 3 * n_elements + 1};
        case BoundaryCondition::ArticulatedFree: return {0, 1};
        case BoundaryCondition::Free: return {};
    }
    return {};
}

double SliderCrankParams::thickness() const { return std::sqrt(12.0 * J2 / m2 - l2 * l2); }
double SliderCrankParams::height() const { return m2 / (rho * l2 * thickness()); }
double SliderCrankParams::area() const { return height() * thickness(); }
double SliderCrankParams::second_moment() const {
    const double D = thickness();
    return height() * D * D * D / 12.0;
}

void SliderCrankParams::validate() const {
    for (double x : {l1, l2, a, b, m1, m2, m3, J1, J2, J3, E, rho})
        if (!(x > 0.0)) throw Error("slider-crank parameters: lengths, masses, inertias, E and rho must be positive");
    if (!(c >= 0.0)) throw Error("slider-crank parameters: gap c must be non-negative");
    if (!(12.0 * J2 / m2 > l2 * l2))
        throw Error("slider-crank parameters: 12 J2 / m2 must exceed l2^2 for a real rod thickness");
    if (n_elements < 1) throw Error("slider-crank parameters: n_elements must be at least 1");
    for (int k = 0; k < 4; ++k) {
        if (!(mu[k] >= 0.0)) throw Error("slider-crank parameters: mu must be non-negative");
        if (!(eps_N[k] >= 0.0 && eps_N[k] <= 1.0) || !(eps_T[k] >= 0.0 && eps_T[k] <= 1.0))
            throw Error("slider-crank parameters: restitution coefficients must lie in [0, 1]");
    }
}

AssembledIntegrals assemble_integrals(const SliderCrankParams& p) {
    p.validate();
    const int ne = p.n_elements;
    const int N = 3 * (ne + 1);
    AssembledIntegrals ai;
    ai.n_f = N;
    ai.I1.setZero();
    ai.I3 = Vector::Zero(N);
    ai.I4 = Vector::Zero(N);
    ai.S_bar = Matrix::Zero(2, N);
    ai.S_tilde = Matrix::Zero(N, N);
    ai.S_ff = Matrix::Zero(N, N);
    ai.K_ff = Matrix::Zero(N, N);

    BeamElement e;
    e.l = p.l2 / ne;
    e.rhoA = p.m2 / p.l2;
    e.EA = p.E * p.area();
    e.EI = p.E * p.second_moment();
    e.thickness = p.thickness();
    for (int j = 0; j < ne; ++j) {
        e.x0 = j * e.l;
        const BeamElementData d = element_shape_integrals(e);
        const int o = 3 * j;
        ai.mass += d.I0(0, 0);
        ai.I1 += d.I1;
        ai.I2 += d.I2;
        ai.I3.segment<6>(o) += d.I3.transpose();
        ai.I4.segment<6>(o) += d.I4.transpose();
        ai.S_bar.middleCols<6>(o) += d.S_bar;
        ai.S_tilde.block<6, 6>(o, o) += d.S_tilde;
        ai.S_ff.block<6, 6>(o, o) += d.S_ff;
        ai.K_ff.block<6, 6>(o, o) += d.K_ff;
    }
    ai.m_ff_rod = ai.S_ff;

    // slider as a point mass at the rod tip
    const int iu = N - 3, iv = N - 2;
    ai.S_check = Matrix::Zero(2, N);
    ai.S_check(0, iu) = 1.0;
    ai.S_check(1, iv) = 1.0;
    const double m3 = p.m3, L = p.l2;
    ai.mass += m3;
    ai.I1[0] += m3 * L;
    ai.I2 += m3 * L * L;
    ai.I3[iu] += m3 * L;
    ai.I4[iv] += m3 * L;
    ai.S_bar += m3 * ai.S_check;
    ai.S_ff(iu, iu) += m3;
    ai.S_ff(iv, iv) += m3;
    ai.S_tilde(iu, iv) += m3;
    ai.S_tilde(iv, iu) -= m3;
    return ai;
}

Matrix selection_basis(int n_f, const IndexSet& eliminated) {
    std::vector<int> keep;
    for (int i = 0; i < n_f; ++i)
        if (std::find(eliminated.begin(), eliminated.end(), i) == eliminated.end()) keep.push_back(i);
    Matrix B = Matrix::Zero(n_f, static_cast<Eigen::Index>(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k) B(keep[k], static_cast<Eigen::Index>(k)) = 1.0;
    return B;
}

FloatingFrameModel::FloatingFrameModel(const SliderCrankParams& p) : p_(p), ai_(assemble_integrals(p)), prefix_("qf") {
    if (p.bc == BoundaryCondition::ArticulatedFree || p.bc == BoundaryCondition::Free)
        throw Error("boundary condition '" + boundary_condition_name(p.bc) +
                    "' leaves a rigid mode in the nodal coordinates; use a modal basis");
    setup(selection_basis(ai_.n_f, constrained_dofs(p.bc, p.n_elements)));
}

FloatingFrameModel::FloatingFrameModel(const SliderCrankParams& p, Matrix basis, std::string coordinate_prefix)
    : p_(p), ai_(assemble_integrals(p)), prefix_(std::move(coordinate_prefix)) {
    if (basis.rows() != ai_.n_f)
        throw Error("elastic basis has " + std::to_string(basis.rows()) + " rows, expected " +
                    std::to_string(ai_.n_f));
    setup(std::move(basis));
}

void FloatingFrameModel::setup(Matrix basis) {
    B_ = std::move(basis);
    n_e_ = static_cast<int>(B_.cols());
    Sbar_ = ai_.S_bar * B_;
    Scheck_ = ai_.S_check * B_;
    Sff_ = B_.transpose() * ai_.S_ff * B_;
    Stilde_ = B_.transpose() * ai_.S_tilde * B_;
    Kff_ = B_.transpose() * ai_.K_ff * B_;
    Sff_ = 0.5 * (Sff_ + Sff_.transpose()).eval();
    Kff_ = 0.5 * (Kff_ + Kff_.transpose()).eval();
    I3_ = ai_.I3.transpose() * B_;
    I4_ = ai_.I4.transpose() * B_;
    cp_.eps_N = Eigen::Map<const Vector>(p_.eps_N.data(), 4);
    cp_.eps_T = Eigen::Map<const Vector>(p_.eps_T.data(), 4);
    cp_.mu = Eigen::Map<const Vector>(p_.mu.data(), 4);
    cp_.validate();
}

std::string FloatingFrameModel::dof_name(int i) const {
    if (i == 0) return "theta1";
    if (i == 1) return "theta2";
    if (i == 2) return "theta3";
    return prefix_ + "_" + std::to_string(i - 3);
}

Vector FloatingFrameModel::elastic_displacements(const Vector& q) const { return B_ * q.tail(n_e_); }

Matrix FloatingFrameModel::mass_matrix(const Vector& q) const {
    const int n = n_dof();
    const Vector eta = q.tail(n_e_);
    const double th1 = q[0], th2 = q[1];
    const Vector2 Ct(-p_.l1 * std::sin(th1), p_.l1 * std::cos(th1));
    const Matrix2 A = rot(th2), At = rot_d(th2);
    const Vector2 U = ai_.I1 + Sbar_ * eta;

    Matrix M = Matrix::Zero(n, n);
    M(0, 0) = ai_.mass * p_.l1 * p_.l1 + p_.crank_inertia();
    M(0, 1) = Ct.dot(At * U);
    M(1, 1) = ai_.I2 + 2.0 * I3_.dot(eta) + eta.dot(Sff_ * eta);
    M(2, 2) = p_.J3;
    if (n_e_ > 0) {
        M.block(0, 3, 1, n_e_) = Ct.transpose() * A * Sbar_;
        M.block(1, 3, 1, n_e_) = I4_ + eta.transpose() * Stilde_;
        M.bottomRightCorner(n_e_, n_e_) = Sff_;
    }
    M(1, 0) = M(0, 1);
    if (n_e_ > 0) {
        M.block(3, 0, n_e_, 1) = M.block(0, 3, 1, n_e_).transpose();
        M.block(3, 1, n_e_, 1) = M.block(1, 3, 1, n_e_).transpose();
    }
    return M;
}

Vector FloatingFrameModel::quadratic_velocity(const Vector& q, const Vector& v) const {
    const Vector eta = q.tail(n_e_), deta = v.tail(n_e_);
    const double th1 = q[0], th2 = q[1], w1 = v[0], w2 = v[1];
    const Vector2 Ct(-p_.l1 * std::sin(th1), p_.l1 * std::cos(th1));
    const Vector2 R(p_.l1 * std::cos(th1), p_.l1 * std::sin(th1));
    const Matrix2 A = rot(th2), At = rot_d(th2);
    const Vector2 U = ai_.I1 + Sbar_ * eta;
    const Vector2 Sd = Sbar_ * deta;

    Vector Q = Vector::Zero(n_dof());
    Q[0] = w2 * w2 * Ct.dot(A * U) - 2.0 * w2 * Ct.dot(At * Sd);
    Q[1] = w1 * w1 * U.dot(At.transpose() * R) - 2.0 * w2 * (I3_.dot(deta) + eta.dot(Sff_ * deta));
    if (n_e_ > 0) {
        Q.tail(n_e_) = w1 * w1 * Sbar_.transpose() * (A.transpose() * R) +
                       w2 * w2 * (I3_.transpose() + Sff_ * eta) + 2.0 * w2 * (Stilde_ * deta);
    }
    return Q;
}

Vector FloatingFrameModel::external_forces(const Vector& q) const {
    const Vector eta = q.tail(n_e_);
    const double th1 = q[0], th2 = q[1];
    const Vector2 g(0.0, -p_.gamma);
    const Vector2 Ct(-p_.l1 * std::sin(th1), p_.l1 * std::cos(th1));
    const Matrix2 A = rot(th2), At = rot_d(th2);
    const Vector2 U = ai_.I1 + Sbar_ * eta;

    Vector h = Vector::Zero(n_dof());
    const double crank = p_.crank_gravity == CrankGravity::Consistent
                             ? 0.5 * p_.m1 * Ct.dot(g)
                             : -p_.m1 * p_.gamma * 0.5 * p_.l1 * std::sin(th1);
    h[0] = ai_.mass * Ct.dot(g) + crank + p_.T_crank;
    h[1] = U.dot(At.transpose() * g);
    if (n_e_ > 0) h.tail(n_e_) = Sbar_.transpose() * (A.transpose() * g);
    return h;
}

Matrix FloatingFrameModel::stiffness_matrix() const {
    Matrix K = Matrix::Zero(n_dof(), n_dof());
    if (n_e_ > 0) K.bottomRightCorner(n_e_, n_e_) = Kff_;
    return K;
}

Vector2 FloatingFrameModel::slider_center(const Vector& q) const {
    const Vector2 R(p_.l1 * std::cos(q[0]), p_.l1 * std::sin(q[0]));
    Vector2 u(p_.l2, 0.0);
    if (n_e_ > 0) u += Scheck_ * q.tail(n_e_);
    return R + rot(q[1]) * u;
}

Vector2 FloatingFrameModel::slider_velocity(const Vector& q, const Vector& v) const {
    const Vector2 Ct(-p_.l1 * std::sin(q[0]), p_.l1 * std::cos(q[0]));
    Vector2 u(p_.l2, 0.0);
    Vector2 r = Ct * v[0];
    if (n_e_ > 0) {
        u += Scheck_ * q.tail(n_e_);
        r += rot(q[1]) * (Scheck_ * v.tail(n_e_));
    }
    return r + rot_d(q[1]) * u * v[1];
}

Vector FloatingFrameModel::normal_gaps(const Vector& q) const {
    const Vector2 r = slider_center(q);
    const double s3 = std::sin(q[2]), c3 = std::cos(q[2]);
    const double h = 0.5 * p_.notch(), a = p_.a, b = p_.b;
    Vector gN(4);
    gN << h - r.y() + a * s3 - b * c3, h - r.y() - a * s3 - b * c3, h + r.y() - a * s3 - b * c3,
        h + r.y() + a * s3 - b * c3;
    return gN;
}

std::pair<Vector, Vector> FloatingFrameModel::gap_functions(const Vector& q) const {
    const Vector2 r = slider_center(q);
    const double s3 = std::sin(q[2]), c3 = std::cos(q[2]);
    const double a = p_.a, b = p_.b;
    Vector gT(4);
    gT << r.x() - a * c3 - b * s3, r.x() + a * c3 - b * s3, r.x() - a * c3 + b * s3, r.x() + a * c3 + b * s3;
    return {normal_gaps(q), gT};
}

std::pair<Matrix, Matrix> FloatingFrameModel::force_directions(const Vector& q) const {
    const int n = n_dof();
    const double th1 = q[0], th2 = q[1];
    const double s3 = std::sin(q[2]), c3 = std::cos(q[2]);
    const double a = p_.a, b = p_.b;
    Vector2 u(p_.l2, 0.0);
    if (n_e_ > 0) u += Scheck_ * q.tail(n_e_);

    // Jacobian of the slider center
    Matrix J = Matrix::Zero(2, n);
    J.col(0) = Vector2(-p_.l1 * std::sin(th1), p_.l1 * std::cos(th1));
    J.col(1) = rot_d(th2) * u;
    if (n_e_ > 0) J.rightCols(n_e_) = rot(th2) * Scheck_;

    Matrix WN(n, 4), WT(n, 4);
    const double sgn[4] = {-1.0, -1.0, 1.0, 1.0};
    const double dN3[4] = {a * c3 + b * s3, -a * c3 + b * s3, -a * c3 + b * s3, a * c3 + b * s3};
    const double dT3[4] = {a * s3 - b * c3, -a * s3 - b * c3, a * s3 + b * c3, -a * s3 + b * c3};
    for (int k = 0; k < 4; ++k) {
        WN.col(k) = sgn[k] * J.row(1).transpose();
        WN(2, k) = dN3[k];
        WT.col(k) = J.row(0).transpose();
        WT(2, k) = dT3[k];
    }
    return {WN, WT};
}

SystemEvaluation FloatingFrameModel::evaluate(const Vector& q, const Vector& v) const {
    if (q.size() != n_dof() || v.size() != n_dof())
        throw Error("FloatingFrameModel::evaluate: state size mismatch");
    SystemEvaluation e;
    e.M = mass_matrix(q);
    e.C = Matrix::Zero(n_dof(), n_dof());
    e.K = stiffness_matrix();
    e.h = external_forces(q) + quadratic_velocity(q, v);
    std::tie(e.W_N, e.W_T) = force_directions(q);
    std::tie(e.g_N, e.g_T) = gap_functions(q);
    return e;
}

double FloatingFrameModel::kinetic_energy(const Vector& q, const Vector& v) const {
    return 0.5 * v.dot(mass_matrix(q) * v);
}

double FloatingFrameModel::elastic_energy(const Vector& q) const {
    if (n_e_ == 0) return 0.0;
    const Vector eta = q.tail(n_e_);
    return 0.5 * eta.dot(Kff_ * eta);
}

double FloatingFrameModel::potential_energy(const Vector& q) const {
    const Vector eta = q.tail(n_e_);
    const double th1 = q[0];
    const Vector2 g(0.0, -p_.gamma);
    const Vector2 R(p_.l1 * std::cos(th1), p_.l1 * std::sin(th1));
    const Vector2 U = ai_.I1 + Sbar_ * eta;
    const double rod = -g.dot(ai_.mass * R + rot(q[1]) * U);
    const double crank = p_.crank_gravity == CrankGravity::Consistent
                             ? -0.5 * p_.m1 * g.dot(R)
                             : -p_.m1 * p_.gamma * 0.5 * p_.l1 * std::cos(th1);
    return rod + crank - p_.T_crank * th1;
}

FloatingFrameModel rigid_slider_crank(const SliderCrankParams& p) {
    SliderCrankParams r = p;
    r.n_elements = 1;
    return FloatingFrameModel(r, Matrix::Zero(6, 0), "qf");
}

}  // namespace nsmbs::fem
