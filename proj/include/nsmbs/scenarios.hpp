#pragma once

#include "nsmbs/fem_beam.hpp"
#include "nsmbs/integrators.hpp"
#include "nsmbs/modal.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace nsmbs {

// M a + C v + K q = h with constant gap rows g_N = W_N^T q + g0
class LinearModel final : public MechanicalModel {
public:
    LinearModel(Matrix M, Matrix C, Matrix K, Vector h);
    LinearModel(Matrix M, Matrix C, Matrix K, Vector h, Matrix W_N, Vector g0, ContactParameters cp);

    int n_dof() const override { return static_cast<int>(M_.rows()); }
    int n_contacts() const override { return static_cast<int>(W_N_.cols()); }
    SystemEvaluation evaluate(const Vector& q, const Vector& v) const override;
    const ContactParameters& contact_parameters() const override { return cp_; }
    std::string dof_name(int i) const override { return "q" + std::to_string(i + 1); }
    double elastic_energy(const Vector& q) const override { return 0.5 * q.dot(K_ * q); }
    // constant loads only
    double potential_energy(const Vector& q) const override { return -h_.dot(q); }

    const Matrix& M() const { return M_; }
    const Matrix& K() const { return K_; }
    const Vector& h() const { return h_; }

private:
    Matrix M_, C_, K_;
    Vector h_;
    Matrix W_N_;
    Vector g0_;
    ContactParameters cp_;
};

// reports every gap as closed, so the velocity-level law acts on each row at every step;
// two opposed rows then form a bilateral constraint
class PersistentContacts final : public MechanicalModel {
public:
    explicit PersistentContacts(std::shared_ptr<const MechanicalModel> inner) : inner_(std::move(inner)) {}

    int n_dof() const override { return inner_->n_dof(); }
    int n_contacts() const override { return inner_->n_contacts(); }
    SystemEvaluation evaluate(const Vector& q, const Vector& v) const override;
    const ContactParameters& contact_parameters() const override { return inner_->contact_parameters(); }
    Vector normal_gaps(const Vector& q) const override { return -inner_->normal_gaps(q).cwiseAbs(); }
    std::string dof_name(int i) const override { return inner_->dof_name(i); }
    double elastic_energy(const Vector& q) const override { return inner_->elastic_energy(q); }
    double potential_energy(const Vector& q) const override { return inner_->potential_energy(q); }

    const MechanicalModel& inner() const { return *inner_; }

private:
    std::shared_ptr<const MechanicalModel> inner_;
};

enum class MassSpringVariant { StiffSpring, BilateralConstraint };

struct MassSpringParams {
    double k1 = 1.0, k2 = 1.0, k3 = 1.0, k0 = 1e7;
    double m1 = 1.0, m2 = 1.0, m3 = 1.0;
    double gamma = 9.81;
};

// (b) drops k0 and holds mass 3 with two opposed gap rows q3 >= 0, -q3 >= 0
std::shared_ptr<MechanicalModel> mass_spring_model(MassSpringVariant variant, const MassSpringParams& p = {});

struct ModalSolution {
    Matrix M;
    Vector omegas;  // ascending
    Matrix Phi;     // mass-normalised columns
    Vector q_static;
};

ModalSolution mass_spring_modes(MassSpringVariant variant, const MassSpringParams& p = {});
// exact response from rest at q0 = 0 under the constant loads
Vector mass_spring_exact(const ModalSolution& ms, const Vector& q0, const Vector& v0, double t);

// generalized-alpha with the bilateral row of model (b) enforced on acceleration level;
// a0 omits the constraint force, as in the unconstrained initial-acceleration formula
struct AccelerationLevelRun {
    std::vector<double> t;
    std::vector<Vector> q, v, a;
    std::vector<double> lambda;
};
AccelerationLevelRun acceleration_level_bilateral(const IntegratorConfig& cfg, double t_end,
                                                  const MassSpringParams& p = {});

enum class ModelKind { Rigid, Fem, Modal };
ModelKind parse_model_kind(const std::string& s);
std::string model_kind_name(ModelKind k);

struct ScenarioConfig {
    std::string id = "slider_crank_t1";
    fem::SliderCrankParams params;
    std::array<double, 3> omega0{150.0, -75.0, 0.0};
    ModelKind model = ModelKind::Fem;
    int n_modes = 8;
    fem::BoundaryCondition modal_bc = fem::BoundaryCondition::TangentialClampedFree;
    bool bilateral = false;
    MassSpringParams mass_spring;
    IntegratorConfig integrator;
    double t_end = 0.05;
    std::vector<std::string> channels{"q", "v"};
    std::string output;
    // reference run for error computation, default finest dt / 4 with the same scheme
    std::optional<double> reference_dt;
    std::optional<Scheme> reference_scheme;

    bool is_mass_spring() const { return id == "mass_spring_a" || id == "mass_spring_b"; }
};

enum class SliderCrankTable { Table1, Table2 };

// tabulated defaults with key=value overrides applied on top; unknown keys throw
ScenarioConfig slider_crank_scenario(SliderCrankTable table, const std::map<std::string, std::string>& overrides = {});
// slider_crank_t1, slider_crank_t2, bilateral, mass_spring_a, mass_spring_b
ScenarioConfig named_scenario(const std::string& id, const std::map<std::string, std::string>& overrides = {});
void apply_overrides(ScenarioConfig& cfg, const std::map<std::string, std::string>& overrides);
std::vector<std::string> override_keys();

// canonical key=value listing and its FNV-1a hash
std::string canonical_config(const ScenarioConfig& cfg);
std::uint64_t config_hash(const ScenarioConfig& cfg);

struct ScenarioModel {
    std::shared_ptr<const MechanicalModel> model;
    // the slider-crank model behind any wrapper, null for the mass-spring problems
    std::shared_ptr<const fem::FloatingFrameModel> slider_crank;
    Vector q0, v0;
};

ScenarioModel build_model(const ScenarioConfig& cfg);

struct Energy {
    double kinetic = 0.0, elastic = 0.0, potential = 0.0;
    double total() const { return kinetic + elastic + potential; }
};

Energy energy(const MechanicalModel& model, const Vector& q, const Vector& v);

// column-major time series, first column t
struct Trajectory {
    std::vector<std::string> names;
    std::vector<std::vector<double>> rows;

    int column(const std::string& name) const;  // throws when missing
    std::vector<double> series(const std::string& name) const;
    Eigen::Index size() const { return static_cast<Eigen::Index>(rows.size()); }
};

// channel groups: q, v, gN, gT, lamN, lamT, LamN, LamT, energy, slider
std::vector<std::string> channel_names(const ScenarioModel& sm, const std::vector<std::string>& groups);

struct RunResult {
    Trajectory trajectory;
    bool completed = false;
    std::string failure;  // solver diagnostics with step and time
    double failure_time = 0.0;
    long steps = 0;
    int impacts = 0;
};

// records the initial state and every step; solver failures are caught and reported
RunResult run_scenario(const ScenarioConfig& cfg);
RunResult run_scenario(const ScenarioConfig& cfg, const ScenarioModel& sm);

struct EnergySeries {
    std::vector<double> t, kinetic, elastic, potential, total;
};

EnergySeries energy_diagnostics(const MechanicalModel& model, const std::vector<GeneralizedState>& states);

struct ErrorEntry {
    double value = 0.0;
    int used = 0;
    int skipped = 0;
};

std::vector<double> default_sample_times(double t_end, double spacing = 1e-3);

// 2-norm over samples of |x - x_ref| / |x_ref|, linear interpolation in time;
// samples with |x_ref| <= zero_tol * max|x_ref| are skipped
ErrorEntry relative_error(const Trajectory& run, const Trajectory& reference, const std::string& channel,
                          const std::vector<double>& sample_times, double zero_tol = 1e-8);

struct ErrorReport {
    std::vector<double> dts;
    std::vector<std::string> channels;
    std::vector<std::vector<ErrorEntry>> errors;  // [channel][dt]
    std::vector<double> slopes;
    std::vector<bool> monotone;
    double reference_dt = 0.0;
};

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

// runs each dt and a self-reference at min(dts)/4 unless the config names one
ErrorReport convergence_study(const ScenarioConfig& cfg, const std::vector<double>& dts,
                              const std::vector<std::string>& channels, int threads = 1);

// NONSMOOTH_MBS_THREADS or 1
int thread_limit();

}  // namespace nsmbs
