#include "nsmbs/scenarios.hpp"

#include "nsmbs/io.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

namespace nsmbs {

using Vector3 = Eigen::Vector3d;

LinearModel::LinearModel(Matrix M, Matrix C, Matrix K, Vector h)
    : LinearModel(std::move(M), std::move(C), std::move(K), std::move(h), Matrix::Zero(0, 0), Vector::Zero(0),
                  ContactParameters::uniform(0, 0.0, 0.0, 0.0)) {}

LinearModel::LinearModel(Matrix M, Matrix C, Matrix K, Vector h, Matrix W_N, Vector g0, ContactParameters cp)
    : M_(std::move(M)), C_(std::move(C)), K_(std::move(K)), h_(std::move(h)), W_N_(std::move(W_N)),
      g0_(std::move(g0)), cp_(std::move(cp)) {
    const auto n = M_.rows();
    if (W_N_.size() == 0) W_N_ = Matrix::Zero(n, 0);
    if (M_.cols() != n || C_.rows() != n || C_.cols() != n || K_.rows() != n || K_.cols() != n || h_.size() != n)
        throw Error("LinearModel: matrix sizes differ");
    if (W_N_.rows() != n || g0_.size() != W_N_.cols() || cp_.mu.size() != W_N_.cols())
        throw Error("LinearModel: gap rows do not match");
    cp_.validate();
}

SystemEvaluation LinearModel::evaluate(const Vector& q, const Vector&) const {
    SystemEvaluation e;
    e.M = M_;
    e.C = C_;
    e.K = K_;
    e.h = h_;
    e.W_N = W_N_;
    e.W_T = Matrix::Zero(M_.rows(), W_N_.cols());
    e.g_N = W_N_.transpose() * q + g0_;
    e.g_T = Vector::Zero(W_N_.cols());
    return e;
}

SystemEvaluation PersistentContacts::evaluate(const Vector& q, const Vector& v) const {
    SystemEvaluation e = inner_->evaluate(q, v);
    e.g_N = -e.g_N.cwiseAbs();
    return e;
}

namespace {

Matrix spring_stiffness(MassSpringVariant variant, const MassSpringParams& p) {
    const double k0 = variant == MassSpringVariant::StiffSpring ? p.k0 : 0.0;
    Matrix K(3, 3);
    K << p.k1 + p.k2, -p.k2, 0.0, -p.k2, p.k2 + p.k3, -p.k3, 0.0, -p.k3, p.k3 + k0;
    return K;
}

Matrix spring_mass(const MassSpringParams& p) { return Vector3(p.m1, p.m2, p.m3).asDiagonal(); }

Vector spring_load(const MassSpringParams& p) { return p.gamma * Vector3(p.m1, p.m2, p.m3); }

}  // namespace

std::shared_ptr<MechanicalModel> mass_spring_model(MassSpringVariant variant, const MassSpringParams& p) {
    const Matrix M = spring_mass(p), C = Matrix::Zero(3, 3), K = spring_stiffness(variant, p);
    const Vector h = spring_load(p);
    if (variant == MassSpringVariant::StiffSpring) return std::make_shared<LinearModel>(M, C, K, h);
    Matrix W(3, 2);
    W << 0.0, 0.0, 0.0, 0.0, 1.0, -1.0;
    auto inner = std::make_shared<LinearModel>(M, C, K, h, W, Vector::Zero(2),
                                               ContactParameters::uniform(2, 0.0, 0.0, 0.0));
    return std::make_shared<PersistentContacts>(inner);
}

ModalSolution mass_spring_modes(MassSpringVariant variant, const MassSpringParams& p) {
    const Matrix M = spring_mass(p), K = spring_stiffness(variant, p);
    const Vector h = spring_load(p);
    const int n = variant == MassSpringVariant::StiffSpring ? 3 : 2;
    const Matrix Mr = M.topLeftCorner(n, n), Kr = K.topLeftCorner(n, n);
    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(Kr, Mr);
    if (es.info() != Eigen::Success) throw Error("mass_spring_modes: eigen solve failed");
    ModalSolution ms;
    ms.M = M;
    ms.omegas = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    ms.Phi = Matrix::Zero(3, n);
    ms.Phi.topRows(n) = es.eigenvectors();
    ms.q_static = Vector::Zero(3);
    ms.q_static.head(n) = Kr.ldlt().solve(Vector(h.head(n)));
    return ms;
}

Vector mass_spring_exact(const ModalSolution& ms, const Vector& q0, const Vector& v0, double t) {
    Vector q = ms.q_static;
    for (Eigen::Index k = 0; k < ms.omegas.size(); ++k) {
        const Vector phi = ms.Phi.col(k);
        const double w = ms.omegas[k];
        const double c = phi.dot(ms.M * (q0 - ms.q_static)), d = phi.dot(ms.M * v0);
        q += phi * (c * std::cos(w * t) + d / w * std::sin(w * t));
    }
    return q;
}

AccelerationLevelRun acceleration_level_bilateral(const IntegratorConfig& cfg, double t_end,
                                                  const MassSpringParams& p) {
    if (cfg.scheme != Scheme::GeneralizedAlpha)
        throw Error("acceleration-level constraint path is only provided for generalized-alpha");
    const GAlphaParams gp = cfg.galpha_resolved();
    const double dt = cfg.dt, am = gp.alpha_m, af = gp.alpha_f, g = gp.gamma, b = gp.beta;
    const Matrix M = spring_mass(p), K = spring_stiffness(MassSpringVariant::BilateralConstraint, p);
    const Vector h = spring_load(p);
    const Vector w = Vector3(0.0, 0.0, 1.0);

    Matrix S = Matrix::Zero(4, 4);
    S.topLeftCorner(3, 3) = M + dt * dt * b * (1.0 - af) / (1.0 - am) * K;
    S.block(0, 3, 3, 1) = -w;
    S.block(3, 0, 1, 3) = w.transpose();
    const Eigen::PartialPivLU<Matrix> lu(S);

    AccelerationLevelRun run;
    Vector q = Vector::Zero(3), v = Vector::Zero(3);
    Vector a = M.ldlt().solve(Vector(h - K * q)), A = a;
    run.t.push_back(0.0);
    run.q.push_back(q);
    run.v.push_back(v);
    run.a.push_back(a);
    run.lambda.push_back(0.0);
    const long n = step_count(t_end, dt);
    for (long k = 0; k < n; ++k) {
        const Vector qhat = q + dt * v + dt * dt * ((0.5 - b) * A + b * (af * a - am * A) / (1.0 - am));
        Vector rhs(4);
        rhs << h - K * qhat, 0.0;
        const Vector x = lu.solve(rhs);
        const Vector a_new = x.head(3);
        const Vector A_new = ((1.0 - af) * a_new + af * a - am * A) / (1.0 - am);
        q += dt * v + dt * dt * ((0.5 - b) * A + b * A_new);
        v += dt * ((1.0 - g) * A + g * A_new);
        a = a_new;
        A = A_new;
        run.t.push_back(static_cast<double>(k + 1) * dt);
        run.q.push_back(q);
        run.v.push_back(v);
        run.a.push_back(a);
        run.lambda.push_back(x[3]);
    }
    return run;
}

ModelKind parse_model_kind(const std::string& s) {
    if (s == "rigid") return ModelKind::Rigid;
    if (s == "fem") return ModelKind::Fem;
    if (s == "modal") return ModelKind::Modal;
    throw Error("unknown model kind '" + s + "' (expected rigid, fem or modal)");
}

std::string model_kind_name(ModelKind k) {
    switch (k) {
        case ModelKind::Rigid: return "rigid";
        case ModelKind::Fem: return "fem";
        case ModelKind::Modal: return "modal";
    }
    return "?";
}

namespace {

std::string join(const std::vector<std::string>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
    return s;
}

template <std::size_t N>
std::string join(const std::array<double, N>& v) {
    std::string s;
    for (std::size_t i = 0; i < N; ++i) s += (i ? "," : "") + format_double(v[i]);
    return s;
}

template <std::size_t N>
void set_array(std::array<double, N>& dst, const std::string& s) {
    const std::vector<double> x = parse_double_list(s);
    if (x.size() == 1) {
        dst.fill(x[0]);
    } else if (x.size() == N) {
        std::copy(x.begin(), x.end(), dst.begin());
    } else {
        throw ParseError("expected 1 or " + std::to_string(N) + " values, got '" + s + "'");
    }
}

struct Field {
    std::string key;
    std::function<void(ScenarioConfig&, const std::string&)> set;
    std::function<std::string(const ScenarioConfig&)> get;
};

// scalar model parameters shared by the slider-crank and mass-spring problems
double* mass_or_crank(ScenarioConfig& c, int k) {
    if (c.is_mass_spring()) return k == 1 ? &c.mass_spring.m1 : k == 2 ? &c.mass_spring.m2 : &c.mass_spring.m3;
    return k == 1 ? &c.params.m1 : k == 2 ? &c.params.m2 : &c.params.m3;
}

const std::vector<Field>& fields() {
    static const std::vector<Field> f = [] {
        std::vector<Field> v;
        auto num = [&v](const std::string& key, auto member) {
            v.push_back({key, [member](ScenarioConfig& c, const std::string& s) { member(c) = parse_double(s); },
                         [member](const ScenarioConfig& c) {
                             ScenarioConfig copy = c;
                             return format_double(member(copy));
                         }});
        };
        num("l1", [](ScenarioConfig& c) -> double& { return c.params.l1; });
        num("l2", [](ScenarioConfig& c) -> double& { return c.params.l2; });
        num("a", [](ScenarioConfig& c) -> double& { return c.params.a; });
        num("b", [](ScenarioConfig& c) -> double& { return c.params.b; });
        num("c", [](ScenarioConfig& c) -> double& { return c.params.c; });
        num("m1", [](ScenarioConfig& c) -> double& { return *mass_or_crank(c, 1); });
        num("m2", [](ScenarioConfig& c) -> double& { return *mass_or_crank(c, 2); });
        num("m3", [](ScenarioConfig& c) -> double& { return *mass_or_crank(c, 3); });
        num("J1", [](ScenarioConfig& c) -> double& { return c.params.J1; });
        num("J2", [](ScenarioConfig& c) -> double& { return c.params.J2; });
        num("J3", [](ScenarioConfig& c) -> double& { return c.params.J3; });
        num("E", [](ScenarioConfig& c) -> double& { return c.params.E; });
        num("rho", [](ScenarioConfig& c) -> double& { return c.params.rho; });
        num("gamma", [](ScenarioConfig& c) -> double& {
            return c.is_mass_spring() ? c.mass_spring.gamma : c.params.gamma;
        });
        num("T_crank", [](ScenarioConfig& c) -> double& { return c.params.T_crank; });
        num("k0", [](ScenarioConfig& c) -> double& { return c.mass_spring.k0; });
        num("k1", [](ScenarioConfig& c) -> double& { return c.mass_spring.k1; });
        num("k2", [](ScenarioConfig& c) -> double& { return c.mass_spring.k2; });
        num("k3", [](ScenarioConfig& c) -> double& { return c.mass_spring.k3; });
        num("omega1_0", [](ScenarioConfig& c) -> double& { return c.omega0[0]; });
        num("omega2_0", [](ScenarioConfig& c) -> double& { return c.omega0[1]; });
        num("omega3_0", [](ScenarioConfig& c) -> double& { return c.omega0[2]; });
        num("crank_inertia_factor", [](ScenarioConfig& c) -> double& { return c.params.crank_inertia_factor; });
        num("rho_inf", [](ScenarioConfig& c) -> double& { return c.integrator.rho_inf; });
        num("dt", [](ScenarioConfig& c) -> double& { return c.integrator.dt; });
        num("t_end", [](ScenarioConfig& c) -> double& { return c.t_end; });
        num("fp_tol", [](ScenarioConfig& c) -> double& { return c.integrator.fp_tol; });
        num("r_force", [](ScenarioConfig& c) -> double& { return c.integrator.r_force; });
        num("solver_tol", [](ScenarioConfig& c) -> double& { return c.integrator.solver.tol; });

        v.push_back({"eps_N", [](ScenarioConfig& c, const std::string& s) { set_array(c.params.eps_N, s); },
                     [](const ScenarioConfig& c) { return join(c.params.eps_N); }});
        v.push_back({"eps_T", [](ScenarioConfig& c, const std::string& s) { set_array(c.params.eps_T, s); },
                     [](const ScenarioConfig& c) { return join(c.params.eps_T); }});
        v.push_back({"mu", [](ScenarioConfig& c, const std::string& s) { set_array(c.params.mu, s); },
                     [](const ScenarioConfig& c) { return join(c.params.mu); }});
        v.push_back({"n_elements", [](ScenarioConfig& c, const std::string& s) { c.params.n_elements = parse_int(s); },
                     [](const ScenarioConfig& c) { return std::to_string(c.params.n_elements); }});
        v.push_back({"bc",
                     [](ScenarioConfig& c, const std::string& s) { c.params.bc = fem::parse_boundary_condition(s); },
                     [](const ScenarioConfig& c) { return fem::boundary_condition_name(c.params.bc); }});
        v.push_back({"crank_gravity",
                     [](ScenarioConfig& c, const std::string& s) {
                         if (s == "consistent")
                             c.params.crank_gravity = fem::CrankGravity::Consistent;
                         else if (s == "printed")
                             c.params.crank_gravity = fem::CrankGravity::Printed;
                         else
                             throw ParseError("crank_gravity must be consistent or printed");
                     },
                     [](const ScenarioConfig& c) {
                         return std::string(c.params.crank_gravity == fem::CrankGravity::Printed ? "printed"
                                                                                                 : "consistent");
                     }});
        v.push_back({"model", [](ScenarioConfig& c, const std::string& s) { c.model = parse_model_kind(s); },
                     [](const ScenarioConfig& c) { return model_kind_name(c.model); }});
        v.push_back({"n_modes", [](ScenarioConfig& c, const std::string& s) { c.n_modes = parse_int(s); },
                     [](const ScenarioConfig& c) { return std::to_string(c.n_modes); }});
        v.push_back({"modal_bc",
                     [](ScenarioConfig& c, const std::string& s) { c.modal_bc = fem::parse_boundary_condition(s); },
                     [](const ScenarioConfig& c) { return fem::boundary_condition_name(c.modal_bc); }});
        v.push_back({"bilateral", [](ScenarioConfig& c, const std::string& s) { c.bilateral = parse_bool(s); },
                     [](const ScenarioConfig& c) { return std::string(c.bilateral ? "true" : "false"); }});
        v.push_back({"integrator",
                     [](ScenarioConfig& c, const std::string& s) { c.integrator.scheme = parse_scheme(s); },
                     [](const ScenarioConfig& c) { return scheme_name(c.integrator.scheme); }});
        v.push_back({"alpha_m",
                     [](ScenarioConfig& c, const std::string& s) {
                         GAlphaParams p = c.integrator.galpha_resolved();
                         p.alpha_m = parse_double(s);
                         c.integrator.galpha = p;
                     },
                     [](const ScenarioConfig& c) { return format_double(c.integrator.galpha_resolved().alpha_m); }});
        v.push_back({"alpha_f",
                     [](ScenarioConfig& c, const std::string& s) {
                         GAlphaParams p = c.integrator.galpha_resolved();
                         p.alpha_f = parse_double(s);
                         c.integrator.galpha = p;
                     },
                     [](const ScenarioConfig& c) { return format_double(c.integrator.galpha_resolved().alpha_f); }});
        v.push_back({"beta",
                     [](ScenarioConfig& c, const std::string& s) {
                         GAlphaParams p = c.integrator.galpha_resolved();
                         p.beta = parse_double(s);
                         c.integrator.galpha = p;
                     },
                     [](const ScenarioConfig& c) { return format_double(c.integrator.galpha_resolved().beta); }});
        v.push_back({"newmark_gamma",
                     [](ScenarioConfig& c, const std::string& s) {
                         GAlphaParams p = c.integrator.galpha_resolved();
                         p.gamma = parse_double(s);
                         c.integrator.galpha = p;
                     },
                     [](const ScenarioConfig& c) { return format_double(c.integrator.galpha_resolved().gamma); }});
        v.push_back({"ed_alpha",
                     [](ScenarioConfig& c, const std::string& s) {
                         EDParams p = c.integrator.ed_resolved();
                         p.alpha = parse_double(s);
                         c.integrator.ed = p;
                     },
                     [](const ScenarioConfig& c) { return format_double(c.integrator.ed_resolved().alpha); }});
        v.push_back({"ed_alpha_AR",
                     [](ScenarioConfig& c, const std::string& s) {
                         EDParams p = c.integrator.ed_resolved();
                         p.alpha_AR = parse_double(s);
                         c.integrator.ed = p;
                     },
                     [](const ScenarioConfig& c) { return format_double(c.integrator.ed_resolved().alpha_AR); }});
        v.push_back({"r_impulse",
                     [](ScenarioConfig& c, const std::string& s) { c.integrator.r_impulse = parse_double(s); },
                     [](const ScenarioConfig& c) { return format_double(c.integrator.impulse_r()); }});
        v.push_back({"fp_max_iter",
                     [](ScenarioConfig& c, const std::string& s) { c.integrator.fp_max_iter = parse_int(s); },
                     [](const ScenarioConfig& c) { return std::to_string(c.integrator.fp_max_iter); }});
        v.push_back({"solver_max_iter",
                     [](ScenarioConfig& c, const std::string& s) { c.integrator.solver.max_iter = parse_int(s); },
                     [](const ScenarioConfig& c) { return std::to_string(c.integrator.solver.max_iter); }});
        v.push_back({"channels", [](ScenarioConfig& c, const std::string& s) { c.channels = split_list(s); },
                     [](const ScenarioConfig& c) { return join(c.channels); }});
        v.push_back({"output", [](ScenarioConfig& c, const std::string& s) { c.output = s; },
                     [](const ScenarioConfig& c) { return c.output; }});
        v.push_back({"reference_dt",
                     [](ScenarioConfig& c, const std::string& s) { c.reference_dt = parse_double(s); },
                     [](const ScenarioConfig& c) {
                         return c.reference_dt ? format_double(*c.reference_dt) : std::string("auto");
                     }});
        v.push_back({"reference_integrator",
                     [](ScenarioConfig& c, const std::string& s) { c.reference_scheme = parse_scheme(s); },
                     [](const ScenarioConfig& c) {
                         return c.reference_scheme ? scheme_name(*c.reference_scheme) : std::string("same");
                     }});
        return v;
    }();
    return f;
}

ScenarioConfig table_defaults(SliderCrankTable table) {
    ScenarioConfig c;
    c.integrator.scheme = Scheme::Bathe;
    c.integrator.dt = 1e-5;
    if (table == SliderCrankTable::Table1) {
        c.id = "slider_crank_t1";
        c.t_end = 0.05;
        return c;
    }
    c.id = "slider_crank_t2";
    c.params.c = 0.0005;
    c.params.T_crank = 1.0;
    c.params.eps_N.fill(0.1);
    c.params.mu.fill(0.1);
    c.omega0 = {0.0, 0.0, 0.0};
    c.t_end = 0.1;
    return c;
}

}  // namespace

std::vector<std::string> override_keys() {
    std::vector<std::string> k;
    for (const Field& f : fields()) k.push_back(f.key);
    return k;
}

void apply_overrides(ScenarioConfig& cfg, const std::map<std::string, std::string>& overrides) {
    for (const auto& [key, value] : overrides) {
        if (key == "id" || key == "scenario") continue;
        const auto it = std::find_if(fields().begin(), fields().end(), [&](const Field& f) { return f.key == key; });
        if (it == fields().end()) throw ParseError("unknown configuration key '" + key + "'");
        try {
            it->set(cfg, value);
        } catch (const ParseError& e) {
            throw ParseError("key '" + key + "': " + e.what());
        } catch (const Error& e) {
            throw ParseError("key '" + key + "': " + e.what());
        }
    }
}

ScenarioConfig slider_crank_scenario(SliderCrankTable table, const std::map<std::string, std::string>& overrides) {
    ScenarioConfig c = table_defaults(table);
    apply_overrides(c, overrides);
    return c;
}

ScenarioConfig named_scenario(const std::string& id, const std::map<std::string, std::string>& overrides) {
    ScenarioConfig c;
    if (id == "slider_crank_t1" || id == "table1") {
        c = table_defaults(SliderCrankTable::Table1);
    } else if (id == "slider_crank_t2" || id == "table2") {
        c = table_defaults(SliderCrankTable::Table2);
    } else if (id == "bilateral") {
        c = table_defaults(SliderCrankTable::Table1);
        c.id = "bilateral";
        c.params.c = 0.0;
        c.bilateral = true;
        c.model = ModelKind::Rigid;
    } else if (id == "mass_spring_a" || id == "mass_spring_b") {
        c.id = id;
        c.integrator.scheme = Scheme::GeneralizedAlpha;
        c.integrator.rho_inf = 0.0;
        c.integrator.dt = 1e-3;
        c.t_end = 0.5;
        c.bilateral = id == "mass_spring_b";
    } else {
        throw ParseError("unknown scenario '" + id +
                         "' (expected slider_crank_t1, slider_crank_t2, bilateral, mass_spring_a, mass_spring_b)");
    }
    apply_overrides(c, overrides);
    return c;
}

std::string canonical_config(const ScenarioConfig& cfg) {
    std::string s = "id=" + cfg.id + "\n";
    for (const Field& f : fields()) s += f.key + "=" + f.get(cfg) + "\n";
    return s;
}

std::uint64_t config_hash(const ScenarioConfig& cfg) {
    std::uint64_t h = 14695981039346656037ull;
    for (const char ch : canonical_config(cfg)) {
        h ^= static_cast<unsigned char>(ch);
        h *= 1099511628211ull;
    }
    return h;
}

ScenarioModel build_model(const ScenarioConfig& cfg) {
    ScenarioModel sm;
    if (cfg.is_mass_spring()) {
        sm.model = mass_spring_model(
            cfg.id == "mass_spring_a" ? MassSpringVariant::StiffSpring : MassSpringVariant::BilateralConstraint,
            cfg.mass_spring);
        sm.q0 = Vector::Zero(3);
        sm.v0 = Vector::Zero(3);
        return sm;
    }
    switch (cfg.model) {
        case ModelKind::Rigid:
            sm.slider_crank = std::make_shared<fem::FloatingFrameModel>(fem::rigid_slider_crank(cfg.params));
            break;
        case ModelKind::Fem:
            sm.slider_crank = std::make_shared<fem::FloatingFrameModel>(cfg.params);
            break;
        case ModelKind::Modal: {
            const fem::FloatingFrameModel full(cfg.params);
            sm.slider_crank = std::make_shared<fem::FloatingFrameModel>(
                modal::reduce_model(full, modal::modal_basis(cfg.params, cfg.modal_bc, cfg.n_modes)));
            break;
        }
    }
    if (cfg.bilateral)
        sm.model = std::make_shared<PersistentContacts>(sm.slider_crank);
    else
        sm.model = sm.slider_crank;
    const int n = sm.model->n_dof();
    sm.q0 = Vector::Zero(n);
    sm.v0 = Vector::Zero(n);
    for (int i = 0; i < 3; ++i) sm.v0[i] = cfg.omega0[static_cast<std::size_t>(i)];
    return sm;
}

Energy energy(const MechanicalModel& model, const Vector& q, const Vector& v) {
    Energy e;
    const MechanicalModel* m = &model;
    if (const auto* pc = dynamic_cast<const PersistentContacts*>(m)) m = &pc->inner();
    if (const auto* ff = dynamic_cast<const fem::FloatingFrameModel*>(m))
        e.kinetic = ff->kinetic_energy(q, v);
    else
        e.kinetic = 0.5 * v.dot(m->evaluate(q, v).M * v);
    e.elastic = m->elastic_energy(q);
    e.potential = m->potential_energy(q);
    return e;
}

int Trajectory::column(const std::string& name) const {
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw Error("trajectory has no channel '" + name + "'");
    return static_cast<int>(it - names.begin());
}

std::vector<double> Trajectory::series(const std::string& name) const {
    const int j = column(name);
    std::vector<double> s;
    s.reserve(rows.size());
    for (const auto& r : rows) s.push_back(r[static_cast<std::size_t>(j)]);
    return s;
}

namespace {

const std::vector<std::string> kGroups{"q", "v", "gN", "gT", "lamN", "lamT", "LamN", "LamT", "energy", "slider"};

}  // namespace

std::vector<std::string> channel_names(const ScenarioModel& sm, const std::vector<std::string>& groups) {
    std::vector<std::string> names{"t"};
    const int n = sm.model->n_dof(), m = sm.model->n_contacts();
    for (const std::string& g : groups) {
        if (std::find(kGroups.begin(), kGroups.end(), g) == kGroups.end())
            throw Error("unknown output channel group '" + g + "'");
        if (g == "q" || g == "v") {
            for (int i = 0; i < n; ++i) names.push_back(g + "_" + sm.model->dof_name(i));
        } else if (g == "energy") {
            for (const char* s : {"energy_kinetic", "energy_elastic", "energy_potential", "energy_total"})
                names.emplace_back(s);
        } else if (g == "slider") {
            if (!sm.slider_crank) throw Error("channel group 'slider' needs a slider-crank model");
            for (const char* s : {"slider_x", "slider_y", "slider_vx", "slider_vy"}) names.emplace_back(s);
        } else {
            if (m == 0) throw Error("channel group '" + g + "' needs a model with contacts");
            for (int k = 0; k < m; ++k) names.push_back(g + "_" + std::to_string(k + 1));
        }
    }
    return names;
}

namespace {

void append_row(const ScenarioModel& sm, const std::vector<std::string>& groups, const GeneralizedState& s,
                const ContactForces* forces, const ImpulseForces* imp, std::vector<double>& row) {
    row.clear();
    row.push_back(s.t);
    const int m = sm.model->n_contacts();
    std::optional<SystemEvaluation> ev;
    auto raw = [&]() -> const SystemEvaluation& {
        if (!ev) {
            const MechanicalModel* base = sm.slider_crank ? sm.slider_crank.get() : sm.model.get();
            if (const auto* pc = dynamic_cast<const PersistentContacts*>(base)) base = &pc->inner();
            ev = base->evaluate(s.q, s.v_plus);
        }
        return *ev;
    };
    for (const std::string& g : groups) {
        if (g == "q") {
            row.insert(row.end(), s.q.data(), s.q.data() + s.q.size());
        } else if (g == "v") {
            row.insert(row.end(), s.v_plus.data(), s.v_plus.data() + s.v_plus.size());
        } else if (g == "gN" || g == "gT") {
            const Vector& x = g == "gN" ? raw().g_N : raw().g_T;
            row.insert(row.end(), x.data(), x.data() + x.size());
        } else if (g == "lamN" || g == "lamT") {
            for (int k = 0; k < m; ++k)
                row.push_back(forces ? (g == "lamN" ? forces->lambda_N[k] : forces->lambda_T[k]) : 0.0);
        } else if (g == "LamN" || g == "LamT") {
            for (int k = 0; k < m; ++k)
                row.push_back(imp ? (g == "LamN" ? imp->Lambda_N[k] : imp->Lambda_T[k]) : 0.0);
        } else if (g == "energy") {
            const Energy e = energy(*sm.model, s.q, s.v_plus);
            row.insert(row.end(), {e.kinetic, e.elastic, e.potential, e.total()});
        } else if (g == "slider") {
            const fem::Vector2 c = sm.slider_crank->slider_center(s.q);
            const fem::Vector2 w = sm.slider_crank->slider_velocity(s.q, s.v_plus);
            row.insert(row.end(), {c.x(), c.y(), w.x(), w.y()});
        }
    }
}

}  // namespace

RunResult run_scenario(const ScenarioConfig& cfg) { return run_scenario(cfg, build_model(cfg)); }

RunResult run_scenario(const ScenarioConfig& cfg, const ScenarioModel& sm) {
    RunResult res;
    res.trajectory.names = channel_names(sm, cfg.channels);
    const GeneralizedState s0 = initial_state(*sm.model, sm.q0, sm.v0, cfg.integrator);
    std::vector<double> row;
    append_row(sm, cfg.channels, s0, nullptr, nullptr, row);
    res.trajectory.rows.push_back(row);
    try {
        const SimulationResult sim =
            simulate_from(*sm.model, s0, cfg.integrator, cfg.t_end, [&](const StepReport& rep) {
                append_row(sm, cfg.channels, rep.state, rep.forces.empty() ? nullptr : &rep.forces.back(),
                           rep.impulses ? &*rep.impulses : nullptr, row);
                res.trajectory.rows.push_back(row);
                res.impacts += rep.impacted;
            });
        res.steps = sim.steps;
        res.completed = true;
    } catch (const IntegrationError& e) {
        res.failure = e.what();
        res.failure_time = e.t;
        res.steps = e.step - 1;
    }
    return res;
}

EnergySeries energy_diagnostics(const MechanicalModel& model, const std::vector<GeneralizedState>& states) {
    EnergySeries es;
    for (const GeneralizedState& s : states) {
        const Energy e = energy(model, s.q, s.v_plus);
        es.t.push_back(s.t);
        es.kinetic.push_back(e.kinetic);
        es.elastic.push_back(e.elastic);
        es.potential.push_back(e.potential);
        es.total.push_back(e.total());
    }
    return es;
}

std::vector<double> default_sample_times(double t_end, double spacing) {
    std::vector<double> t;
    for (long k = 1;; ++k) {
        const double tk = static_cast<double>(k) * spacing;
        if (tk > t_end * (1.0 + 1e-12)) break;
        t.push_back(tk);
    }
    return t;
}

namespace {

double interpolate(const Trajectory& tr, int col, double t) {
    const auto& rows = tr.rows;
    if (rows.empty()) throw Error("relative_error: empty trajectory");
    const double tol = 1e-9 * std::max(1.0, std::abs(t));
    if (t < rows.front()[0] - tol || t > rows.back()[0] + tol)
        throw Error("relative_error: sample time " + format_double(t) + " outside the recorded interval");
    const auto it = std::lower_bound(rows.begin(), rows.end(), t,
                                     [](const std::vector<double>& r, double x) { return r[0] < x; });
    if (it != rows.end() && std::abs((*it)[0] - t) <= tol) return (*it)[static_cast<std::size_t>(col)];
    if (it != rows.begin() && std::abs((*(it - 1))[0] - t) <= tol) return (*(it - 1))[static_cast<std::size_t>(col)];
    if (it == rows.end()) return rows.back()[static_cast<std::size_t>(col)];
    const auto& r1 = *it;
    const auto& r0 = *(it - 1);
    const double w = (t - r0[0]) / (r1[0] - r0[0]);
    const auto j = static_cast<std::size_t>(col);
    return (1.0 - w) * r0[j] + w * r1[j];
}

}  // namespace

ErrorEntry relative_error(const Trajectory& run, const Trajectory& reference, const std::string& channel,
                          const std::vector<double>& sample_times, double zero_tol) {
    const int cr = run.column(channel), cref = reference.column(channel);
    std::vector<double> ref, x;
    for (double t : sample_times) {
        ref.push_back(interpolate(reference, cref, t));
        x.push_back(interpolate(run, cr, t));
    }
    double big = 0.0;
    for (double r : ref) big = std::max(big, std::abs(r));
    ErrorEntry e;
    double sum = 0.0;
    for (std::size_t k = 0; k < ref.size(); ++k) {
        if (!(std::abs(ref[k]) > zero_tol * big)) {
            ++e.skipped;
            continue;
        }
        const double d = (x[k] - ref[k]) / ref[k];
        sum += d * d;
        ++e.used;
    }
    if (e.used == 0) throw Error("relative_error: no usable samples for '" + channel + "'");
    e.value = std::sqrt(sum);
    return e;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw Error("loglog_slope: need at least two points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0 && y[i] > 0.0)) throw Error("loglog_slope: values must be positive");
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

int thread_limit() {
    if (const char* s = std::getenv("NONSMOOTH_MBS_THREADS")) {
        try {
            return std::max(1, parse_int(s));
        } catch (const Error&) {
            throw ParseError(std::string("NONSMOOTH_MBS_THREADS must be an integer, got '") + s + "'");
        }
    }
    return 1;
}

ErrorReport convergence_study(const ScenarioConfig& cfg, const std::vector<double>& dts,
                              const std::vector<std::string>& channels, int threads) {
    if (dts.size() < 3) throw Error("convergence_study: at least three time steps are needed");
    if (channels.empty()) throw Error("convergence_study: no channel requested");
    ErrorReport rep;
    rep.dts = dts;
    rep.channels = channels;
    rep.reference_dt = cfg.reference_dt ? *cfg.reference_dt : *std::min_element(dts.begin(), dts.end()) / 4.0;

    std::vector<ScenarioConfig> runs;
    for (double dt : dts) {
        ScenarioConfig c = cfg;
        c.integrator.dt = dt;
        runs.push_back(c);
    }
    ScenarioConfig rc = cfg;
    rc.integrator.dt = rep.reference_dt;
    if (cfg.reference_scheme) rc.integrator.scheme = *cfg.reference_scheme;
    runs.push_back(rc);

    std::vector<RunResult> results(runs.size());
    std::atomic<std::size_t> next{0};
    std::mutex err_mutex;
    std::string first_error;
    auto worker = [&]() {
        for (std::size_t i = next++; i < runs.size(); i = next++) {
            try {
                results[i] = run_scenario(runs[i]);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (first_error.empty()) first_error = e.what();
            }
        }
    };
    const int nt = std::clamp(threads, 1, static_cast<int>(runs.size()));
    std::vector<std::thread> pool;
    for (int i = 1; i < nt; ++i) pool.emplace_back(worker);
    worker();
    for (std::thread& t : pool) t.join();
    if (!first_error.empty()) throw Error("convergence_study: " + first_error);
    for (std::size_t i = 0; i < runs.size(); ++i)
        if (!results[i].completed)
            throw IntegrationError("convergence_study: run with dt = " + format_double(runs[i].integrator.dt) +
                                       " failed: " + results[i].failure,
                                   results[i].steps + 1, results[i].failure_time);

    const Trajectory& ref = results.back().trajectory;
    const std::vector<double> samples = default_sample_times(cfg.t_end);
    for (const std::string& ch : channels) {
        std::vector<ErrorEntry> row;
        std::vector<double> vals;
        for (std::size_t i = 0; i < dts.size(); ++i) {
            row.push_back(relative_error(results[i].trajectory, ref, ch, samples));
            vals.push_back(row.back().value);
        }
        std::vector<std::size_t> order(dts.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return dts[a] > dts[b]; });
        bool mono = true;
        for (std::size_t i = 1; i < order.size(); ++i) mono = mono && vals[order[i]] < vals[order[i - 1]];
        rep.errors.push_back(row);
        rep.slopes.push_back(loglog_slope(dts, vals));
        rep.monotone.push_back(mono);
    }
    return rep;
}

}  // namespace nsmbs
