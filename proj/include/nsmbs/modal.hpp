#pragma once

#include "nsmbs/fem_beam.hpp"

namespace nsmbs::modal {

using fem::BoundaryCondition;

struct ModalBasis {
    Matrix Phi;      // constrained elastic coordinates x n_m, mass-normalised
    Vector omegas;   // rad/s, ascending
    BoundaryCondition bc = BoundaryCondition::TangentialClampedFree;
    int n_m = 0;
    Matrix embedding;  // full q_f x constrained coordinates

    Matrix full_basis() const { return embedding * Phi; }
};

// lowest n_m pairs of (K - w^2 M) phi = 0; largest-magnitude entry of each mode positive
ModalBasis eigenmodes(const Matrix& m_ff, const Matrix& K_ff, int n_m);

// eigenproblem on the rod's constrained (m_ff, K_ff); with include_slider the tip mass enters m_ff
ModalBasis modal_basis(const fem::SliderCrankParams& p, BoundaryCondition bc, int n_m, bool include_slider = true);

// joint pinned, tip free; the rigid rotation about the joint is dropped
ModalBasis articulated_free_basis(const fem::SliderCrankParams& p, int n_m, bool include_slider = true);

// q_f = embedding * Phi * q_m
fem::FloatingFrameModel reduce_model(const fem::FloatingFrameModel& model, const ModalBasis& basis);

// number of modes with f <= f_cut [Hz]
int modes_below(const ModalBasis& basis, double f_cut);

struct FreeFreeReport {
    int n_elastic = 0;
    double max_mean = 0.0;    // |int phi dV| / (m * max|phi|)
    double max_moment = 0.0;  // |int r x phi dV| about the mass centre, same scaling times length
    Vector omegas;
};

// verifies the vanishing-integral conditions on free-free rod modes
FreeFreeReport free_free_diagnostic(const fem::SliderCrankParams& p, int n_m);

// norm of the constant theta2 / elastic coupling row (I4 through the basis)
double theta_f_coupling(const fem::FloatingFrameModel& model);

}  // namespace nsmbs::modal
