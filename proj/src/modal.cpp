#include "nsmbs/modal.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>

namespace nsmbs::modal {

ModalBasis eigenmodes(const Matrix& m_ff, const Matrix& K_ff, int n_m) {
    const int n = static_cast<int>(m_ff.rows());
    if (m_ff.cols() != n || K_ff.rows() != n || K_ff.cols() != n) throw Error("eigenmodes: matrix size mismatch");
    if (n_m < 1 || n_m > n)
        throw Error("eigenmodes: requested " + std::to_string(n_m) + " modes of " + std::to_string(n));
    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(K_ff, m_ff);
    if (es.info() != Eigen::Success) throw Error("eigenmodes: eigen solve failed (mass matrix not positive definite?)");

    ModalBasis b;
    b.n_m = n_m;
    b.Phi = es.eigenvectors().leftCols(n_m);
    b.omegas.resize(n_m);
    for (int k = 0; k < n_m; ++k) {
        b.omegas[k] = std::sqrt(std::max(es.eigenvalues()[k], 0.0));
        Eigen::Index imax = 0;
        b.Phi.col(k).cwiseAbs().maxCoeff(&imax);
        if (b.Phi(imax, k) < 0.0) b.Phi.col(k) *= -1.0;
    }
    b.embedding = Matrix::Identity(n, n);
    return b;
}

namespace {

ModalBasis constrained_modes(const fem::SliderCrankParams& p, BoundaryCondition bc, int n_m, int skip,
                             bool include_slider) {
    const fem::AssembledIntegrals ai = fem::assemble_integrals(p);
    const Matrix E = fem::selection_basis(ai.n_f, fem::constrained_dofs(bc, p.n_elements));
    const Matrix& mff = include_slider ? ai.S_ff : ai.m_ff_rod;
    const Matrix M = E.transpose() * mff * E, K = E.transpose() * ai.K_ff * E;
    if (n_m + skip > M.rows())
        throw Error("modal basis: " + std::to_string(n_m) + " modes requested, " +
                    std::to_string(M.rows() - skip) + " available");
    ModalBasis all = eigenmodes(0.5 * (M + M.transpose()), 0.5 * (K + K.transpose()), n_m + skip);
    ModalBasis b;
    b.Phi = all.Phi.rightCols(n_m);
    b.omegas = all.omegas.tail(n_m);
    b.n_m = n_m;
    b.bc = bc;
    b.embedding = E;
    return b;
}

}  // namespace

ModalBasis modal_basis(const fem::SliderCrankParams& p, BoundaryCondition bc, int n_m, bool include_slider) {
    if (bc == BoundaryCondition::ArticulatedFree) return articulated_free_basis(p, n_m, include_slider);
    return constrained_modes(p, bc, n_m, 0, include_slider);
}

ModalBasis articulated_free_basis(const fem::SliderCrankParams& p, int n_m, bool include_slider) {
    return constrained_modes(p, BoundaryCondition::ArticulatedFree, n_m, 1, include_slider);
}

fem::FloatingFrameModel reduce_model(const fem::FloatingFrameModel& model, const ModalBasis& basis) {
    const int n_f = model.integrals().n_f;
    if (basis.embedding.rows() != n_f || basis.embedding.cols() != basis.Phi.rows())
        throw Error("reduce_model: basis does not match the model's elastic coordinates (" +
                    std::to_string(basis.embedding.rows()) + " vs " + std::to_string(n_f) + " rows)");
    return fem::FloatingFrameModel(model.params(), basis.full_basis(), "qm");
}

int modes_below(const ModalBasis& basis, double f_cut) {
    int n = 0;
    for (int k = 0; k < basis.omegas.size(); ++k) n += basis.omegas[k] / (2.0 * std::numbers::pi) <= f_cut;
    return n;
}

FreeFreeReport free_free_diagnostic(const fem::SliderCrankParams& p, int n_m) {
    const fem::AssembledIntegrals ai = fem::assemble_integrals(p);
    const int N = ai.n_f;
    if (n_m + 3 > N) throw Error("free_free_diagnostic: too many modes requested");
    const ModalBasis b = eigenmodes(ai.m_ff_rod, ai.K_ff, n_m + 3);

    // rod-only first moments: the slider is not part of the free-free body
    const Matrix S_bar = ai.S_bar - p.m3 * ai.S_check;
    Vector I4 = ai.I4;
    I4[N - 2] -= p.m3 * p.l2;
    const double m = p.m2, xc = 0.5 * p.l2;

    FreeFreeReport rep;
    rep.n_elastic = n_m;
    rep.omegas = b.omegas;
    for (int k = 3; k < n_m + 3; ++k) {
        const Vector phi = b.Phi.col(k);
        const double scale = m * phi.cwiseAbs().maxCoeff();
        const Eigen::Vector2d mean = S_bar * phi;
        // planar moment about the mass centre: int (x - xc) * phi_y - y * phi_x, thickness term vanishes
        const double moment = I4.dot(phi) - xc * mean.y();
        rep.max_mean = std::max(rep.max_mean, mean.norm() / scale);
        rep.max_moment = std::max(rep.max_moment, std::abs(moment) / (scale * p.l2));
    }
    return rep;
}

double theta_f_coupling(const fem::FloatingFrameModel& model) {
    return (model.integrals().I4.transpose() * model.basis()).norm();
}

}  // namespace nsmbs::modal
