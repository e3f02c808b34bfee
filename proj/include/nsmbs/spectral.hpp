#pragma once

#include "nsmbs/integrators.hpp"

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace nsmbs {

// state vector (q, dt*v, dt^2*A) with a = -Omega^2 q
Matrix amplification_galpha(double Omega, const GAlphaParams& p);
// state vector (q, dt*v, dt^2*a)
Matrix amplification_bathe(double Omega);

// columns are one-step images of the unit states (q, dt*v, dt^2*a) for the undamped oscillator;
// for generalized-alpha the third entry is the auxiliary acceleration A
Matrix numerical_amplification(const IntegratorConfig& cfg, double Omega);

std::vector<std::complex<double>> amplification_eigenvalues(const Matrix& A);
double spectral_radius(const Matrix& A);
// relative period elongation from the principal complex pair, empty in the real-root regime
std::optional<double> period_error(const Matrix& A, double Omega);

struct StabilityReport {
    bool stable = false;
    bool cusp = false;
    bool no_dissipation = false;
    std::complex<double> lambda_inf_principal;
    double lambda_inf_spurious = 0.0;
    std::string summary;
};

StabilityReport stability_check(double alpha_m, double alpha_f, double beta);

struct SpectralSweep {
    std::string scheme;
    std::vector<double> dt_over_T;
    std::vector<double> omegas;
    std::vector<double> rho;
    std::vector<std::optional<double>> period_error;
};

enum class SpectralMethod { ClosedForm, Numerical };

SpectralSweep spectral_sweep(const IntegratorConfig& cfg, int points = 400, double lo = 1e-3, double hi = 1e2,
                             SpectralMethod method = SpectralMethod::ClosedForm);

std::vector<double> logspace(double lo, double hi, int n);

}  // namespace nsmbs
