#include "nsmbs/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include <sstream>

namespace nsmbs {

Matrix amplification_galpha(double W, const GAlphaParams& p) {
    const double am = p.alpha_m, af = p.alpha_f, g = p.gamma, b = p.beta;
    const double W2 = W * W;
    const double D = 1.0 - am + (1.0 - af) * b * W2;
    if (D == 0.0) throw Error("amplification_galpha: D = 0");
    Matrix A(3, 3);
    A << 1.0 - am - af * b * W2, 1.0 - am, (0.5 - b) * (1.0 - am) - b * am,
        -g * W2, 1.0 - am - (1.0 - af) * (g - b) * W2,
        (1.0 - g) * (1.0 - am) - g * am - (1.0 - af) * (0.5 * g - b) * W2,
        -W2, -(1.0 - af) * W2, -(1.0 - af) * (0.5 - b) * W2 - am;
    return A / D;
}

Matrix amplification_bathe(double W) {
    const double W2 = W * W;
    const double D = (16.0 + W2) * (9.0 + W2);
    Matrix A(3, 3);
    A << 144.0 - 19.0 * W2, 144.0 - 5.0 * W2, 28.0,
        W2 * (W2 - 96.0), 144.0 - 47.0 * W2, 48.0 - 4.0 * W2,
        W2 * (19.0 * W2 - 144.0), W2 * (5.0 * W2 - 144.0), -28.0 * W2;
    return A / D;
}

namespace {

class Oscillator final : public MechanicalModel {
public:
    explicit Oscillator(double omega) : omega_(omega), params_(ContactParameters::uniform(0, 0, 0, 0)) {}
    int n_dof() const override { return 1; }
    int n_contacts() const override { return 0; }
    SystemEvaluation evaluate(const Vector&, const Vector&) const override {
        SystemEvaluation e;
        e.M = Matrix::Identity(1, 1);
        e.C = Matrix::Zero(1, 1);
        e.K = Matrix::Constant(1, 1, omega_ * omega_);
        e.h = Vector::Zero(1);
        e.W_N = Matrix::Zero(1, 0);
        e.W_T = Matrix::Zero(1, 0);
        e.g_N = Vector::Zero(0);
        e.g_T = Vector::Zero(0);
        return e;
    }
    const ContactParameters& contact_parameters() const override { return params_; }

private:
    double omega_;
    ContactParameters params_;
};

}  // namespace

Matrix numerical_amplification(const IntegratorConfig& cfg_in, double W) {
    IntegratorConfig cfg = cfg_in;
    cfg.dt = 1.0;
    const Oscillator model(W);
    Matrix A(3, 3);
    for (int k = 0; k < 3; ++k) {
        GeneralizedState s;
        s.q = Vector::Constant(1, k == 0 ? 1.0 : 0.0);
        s.v_plus = s.v_minus = Vector::Constant(1, k == 1 ? 1.0 : 0.0);
        if (cfg.scheme == Scheme::GeneralizedAlpha) {
            s.A = Vector::Constant(1, k == 2 ? 1.0 : 0.0);
            s.a = -W * W * s.q;
        } else {
            s.a = Vector::Constant(1, k == 2 ? 1.0 : 0.0);
            s.A = s.a;
        }
        const StepReport r = base_step(model, s, cfg);
        const double third = cfg.scheme == Scheme::GeneralizedAlpha ? r.state.A[0] : r.state.a[0];
        A.col(k) << r.state.q[0], r.state.v_plus[0], third;
    }
    return A;
}

namespace {

// diagonal similarity with power-of-two factors so rows and columns have comparable norms
Matrix balanced(Matrix A) {
    const Eigen::Index n = A.rows();
    for (bool changed = true; changed;) {
        changed = false;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double c = A.col(i).cwiseAbs().sum() - std::abs(A(i, i));
            const double r = A.row(i).cwiseAbs().sum() - std::abs(A(i, i));
            if (c == 0.0 || r == 0.0) continue;
            double f = 1.0, cc = c, rr = r;
            while (cc < rr / 2.0) cc *= 2.0, rr /= 2.0, f *= 2.0;
            while (cc >= rr * 2.0) cc /= 2.0, rr *= 2.0, f /= 2.0;
            if ((cc + rr) < 0.95 * (c + r)) {
                A.col(i) *= f;
                A.row(i) /= f;
                changed = true;
            }
        }
    }
    return A;
}

}  // namespace

std::vector<std::complex<double>> amplification_eigenvalues(const Matrix& A) {
    Eigen::EigenSolver<Matrix> es(balanced(A), false);
    if (es.info() != Eigen::Success) throw Error("eigenvalue computation failed");
    std::vector<std::complex<double>> out;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) out.push_back(es.eigenvalues()[i]);
    return out;
}

double spectral_radius(const Matrix& A) {
    double rho = 0.0;
    for (const auto& l : amplification_eigenvalues(A)) rho = std::max(rho, std::abs(l));
    return rho;
}

std::optional<double> period_error(const Matrix& A, double W) {
    std::optional<std::complex<double>> best;
    for (const auto& l : amplification_eigenvalues(A)) {
        if (std::abs(l.imag()) <= 1e-12 * std::max(std::abs(l), 1e-300)) continue;
        if (l.imag() < 0.0) continue;
        if (!best || std::abs(l) > std::abs(*best)) best = l;
    }
    if (!best) return std::nullopt;
    return W / std::arg(*best) - 1.0;
}

StabilityReport stability_check(double am, double af, double beta) {
    StabilityReport r;
    r.stable = am <= af && af <= 0.5 && beta >= 0.25 + 0.5 * (af - am);
    const double g = 0.5 - am + af;
    const double t = 2.0 * g + 1.0;
    const std::complex<double> root = std::sqrt(std::complex<double>(16.0 * beta - t * t, 0.0));
    r.lambda_inf_principal = (std::complex<double>(4.0 * beta - t, 0.0) + std::complex<double>(0.0, 1.0) * root) / (4.0 * beta);
    r.lambda_inf_spurious = af / (af - 1.0);
    const double lp = std::abs(r.lambda_inf_principal);
    r.cusp = std::abs(r.lambda_inf_spurious) > lp + 1e-12;
    r.no_dissipation = std::abs(std::max(lp, std::abs(r.lambda_inf_spurious)) - 1.0) < 1e-12;
    std::ostringstream os;
    os << (r.stable ? "stable" : "unstable") << ", |lambda_inf_12| = " << lp
       << ", |lambda_inf_3| = " << std::abs(r.lambda_inf_spurious);
    if (r.cusp) os << ", cusp expected";
    if (r.no_dissipation) os << ", no high-frequency dissipation";
    r.summary = os.str();
    return r;
}

std::vector<double> logspace(double lo, double hi, int n) {
    std::vector<double> out;
    if (n == 1) return {lo};
    const double a = std::log10(lo), b = std::log10(hi);
    for (int i = 0; i < n; ++i) out.push_back(std::pow(10.0, a + (b - a) * i / (n - 1)));
    return out;
}

SpectralSweep spectral_sweep(const IntegratorConfig& cfg, int points, double lo, double hi, SpectralMethod method) {
    if (points < 1) throw Error("spectral sweep needs at least one point");
    SpectralSweep s;
    s.scheme = scheme_name(cfg.scheme);
    for (double x : logspace(lo, hi, points)) {
        const double W = 2.0 * std::numbers::pi * x;
        Matrix A;
        if (method == SpectralMethod::ClosedForm && cfg.scheme == Scheme::GeneralizedAlpha)
            A = amplification_galpha(W, cfg.galpha_resolved());
        else if (method == SpectralMethod::ClosedForm && cfg.scheme == Scheme::Bathe)
            A = amplification_bathe(W);
        else
            A = numerical_amplification(cfg, W);
        s.dt_over_T.push_back(x);
        s.omegas.push_back(W);
        s.rho.push_back(spectral_radius(A));
        s.period_error.push_back(period_error(A, W));
    }
    return s;
}

}  // namespace nsmbs
