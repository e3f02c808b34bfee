#include "doctest.h"
#include "nsmbs/integrators.hpp"
#include "nsmbs/modal.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace nsmbs;
using namespace nsmbs::modal;
using fem::SliderCrankParams;

namespace {

double bending_scale(const SliderCrankParams& p) {
    return std::sqrt(p.E * p.second_moment() / (p.m2 / p.l2)) / (p.l2 * p.l2);
}

// share of the axial entries in a mode shape over the full q_f
double axial_share(const ModalBasis& b, int k) {
    const Vector phi = b.full_basis().col(k);
    double t = 0.0;
    for (int i = 0; i < phi.size(); i += 3) t += phi[i] * phi[i];
    return t / phi.squaredNorm();
}

}  // namespace

TEST_CASE("unconstrained rod has three rigid modes") {
    SliderCrankParams p;
    p.n_elements = 6;
    const fem::AssembledIntegrals ai = fem::assemble_integrals(p);
    const ModalBasis b = eigenmodes(ai.m_ff_rod, ai.K_ff, 5);
    for (int k = 0; k < 3; ++k) CHECK(b.omegas[k] < 1e-5 * b.omegas[3]);
    CHECK(b.omegas[3] > 0.0);
    CHECK_THROWS_AS(eigenmodes(ai.m_ff_rod, ai.K_ff, ai.n_f + 1), Error);
    CHECK_THROWS_AS(eigenmodes(ai.m_ff_rod, Matrix::Zero(3, 3), 2), Error);
}

TEST_CASE("modal basis is mass-orthonormal and diagonalises stiffness") {
    SliderCrankParams p;
    p.n_elements = 8;
    for (fem::BoundaryCondition bc : {fem::BoundaryCondition::TangentialClampedFree, fem::BoundaryCondition::Pinned,
                                      fem::BoundaryCondition::ArticulatedFree}) {
        const ModalBasis b = modal_basis(p, bc, 10);
        const fem::AssembledIntegrals ai = fem::assemble_integrals(p);
        const Matrix Phi = b.full_basis();
        const Matrix Mm = Phi.transpose() * ai.S_ff * Phi, Km = Phi.transpose() * ai.K_ff * Phi;
        CHECK((Mm - Matrix::Identity(10, 10)).cwiseAbs().maxCoeff() < 1e-10);
        const Matrix Kd = b.omegas.array().square().matrix().asDiagonal();
        CHECK((Km - Kd).cwiseAbs().maxCoeff() < 1e-8 * Kd.maxCoeff());
        for (int k = 1; k < 10; ++k) CHECK(b.omegas[k] >= b.omegas[k - 1]);
        for (int k = 0; k < 10; ++k) {
            Eigen::Index i = 0;
            b.Phi.col(k).cwiseAbs().maxCoeff(&i);
            CHECK(b.Phi(i, k) > 0.0);
        }
        const ModalBasis again = modal_basis(p, bc, 10);
        CHECK(again.Phi == b.Phi);
    }
}

TEST_CASE("clamped-free rod frequency matches the cantilever formula") {
    SliderCrankParams p;
    p.n_elements = 20;
    const ModalBasis b = modal_basis(p, fem::BoundaryCondition::TangentialClampedFree, 4, false);
    const double bl = 1.875104068711961;
    CHECK(std::abs(b.omegas[0] / (bl * bl * bending_scale(p)) - 1.0) < 0.01);
    CHECK(axial_share(b, 0) < 1e-6);
}

TEST_CASE("articulated-free rod: first bending frequency and vanishing rotation coupling") {
    SliderCrankParams p;
    p.n_elements = 20;
    const ModalBasis b = articulated_free_basis(p, 6, false);
    int first_bending = -1;
    for (int k = 0; k < 6 && first_bending < 0; ++k)
        if (axial_share(b, k) < 1e-6) first_bending = k;
    REQUIRE(first_bending >= 0);
    const double bl = 3.926602312047919;
    CHECK(std::abs(b.omegas[first_bending] / (bl * bl * bending_scale(p)) - 1.0) < 0.02);
    // the axial fixed-free bar mode sits below it for this rod
    const double axial = 0.5 * std::numbers::pi * std::sqrt(p.E / p.rho) / p.l2;
    CHECK(std::abs(b.omegas[0] / axial - 1.0) < 0.01);
    CHECK(axial_share(b, 0) > 0.999);

    const fem::FloatingFrameModel full(p);
    const int n_m = 8;
    const double c_clamped =
        theta_f_coupling(reduce_model(full, modal_basis(p, fem::BoundaryCondition::TangentialClampedFree, n_m)));
    const double c_artic = theta_f_coupling(reduce_model(full, articulated_free_basis(p, n_m)));
    MESSAGE("constant theta2/elastic coupling: clamped-free " << c_clamped << ", articulated-free " << c_artic);
    CHECK(c_artic < 1e-10 * c_clamped);
}

TEST_CASE("free-free rod modes satisfy the vanishing-integral conditions") {
    SliderCrankParams p;
    p.n_elements = 12;
    const FreeFreeReport r = free_free_diagnostic(p, 8);
    MESSAGE("free-free: mean " << r.max_mean << ", moment " << r.max_moment);
    CHECK(r.max_mean < 1e-9);
    CHECK(r.max_moment < 1e-9);
}

TEST_CASE("reduction with the full basis is a change of coordinates") {
    SliderCrankParams p;
    p.n_elements = 4;
    const fem::FloatingFrameModel full(p);
    const int n_c = full.n_elastic();
    const ModalBasis b = modal_basis(p, p.bc, n_c);
    const fem::FloatingFrameModel red = reduce_model(full, b);
    CHECK(red.n_dof() == full.n_dof());
    CHECK((red.m_ff() - Matrix::Identity(n_c, n_c)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((red.k_ff() - Matrix(b.omegas.array().square().matrix().asDiagonal())).cwiseAbs().maxCoeff() <
          1e-8 * b.omegas.array().square().maxCoeff());
    CHECK(red.dof_name(3) == "qm_0");

    Matrix T = Matrix::Zero(full.n_dof(), full.n_dof());
    T.topLeftCorner(3, 3).setIdentity();
    T.bottomRightCorner(n_c, n_c) = b.Phi;
    std::mt19937 rng(2);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int trial = 0; trial < 3; ++trial) {
        Vector qr(full.n_dof()), vr(full.n_dof());
        for (int i = 0; i < qr.size(); ++i) {
            qr[i] = i < 3 ? U(rng) : 1e-4 * U(rng);
            vr[i] = i < 3 ? 10 * U(rng) : 1e-2 * U(rng);
        }
        const Vector qf = T * qr, vf = T * vr;
        const SystemEvaluation er = red.evaluate(qr, vr), ef = full.evaluate(qf, vf);
        CHECK((er.M - T.transpose() * ef.M * T).norm() < 1e-10 * er.M.norm());
        CHECK((er.h - T.transpose() * ef.h).norm() < 1e-10 * er.h.norm());
        CHECK((er.W_N - T.transpose() * ef.W_N).norm() < 1e-12);
        CHECK((er.g_N - ef.g_N).norm() < 1e-15);
    }

    IntegratorConfig cfg;
    cfg.scheme = Scheme::Bathe;
    cfg.dt = 1e-5;
    Vector q0 = Vector::Zero(full.n_dof()), v0 = Vector::Zero(full.n_dof());
    v0[0] = 150.0;
    v0[1] = -75.0;
    const SimulationResult rf = simulate(full, q0, v0, cfg, 2e-3);
    const SimulationResult rr = simulate(red, q0, v0, cfg, 2e-3);
    const fem::Vector2 cf = full.slider_center(rf.final_state.q), cr = red.slider_center(rr.final_state.q);
    CHECK((cf - cr).norm() < 1e-8);
    CHECK((T * rr.final_state.q - rf.final_state.q).cwiseAbs().maxCoeff() < 1e-8);

    SliderCrankParams other = p;
    other.n_elements = 5;
    CHECK_THROWS_AS(reduce_model(fem::FloatingFrameModel(other), b), Error);
}

TEST_CASE("cutoff mode count on the 63-coordinate mesh") {
    SliderCrankParams p;
    p.n_elements = 21;
    const ModalBasis b = modal_basis(p, fem::BoundaryCondition::TangentialClampedFree, 63);
    const int n = modes_below(b, 1e7);
    MESSAGE("modes with f <= 1e7 Hz: " << n << " of 63");
    CHECK(n >= 50);
    CHECK(n <= 54);
    CHECK(modes_below(b, 0.0) == 0);
    CHECK(modes_below(b, 1e12) == 63);
}
