#include "nsmbs/integrators.hpp"

#include <cmath>
#include <sstream>

namespace nsmbs {

Scheme parse_scheme(const std::string& name) {
    if (name == "galpha" || name == "generalized_alpha") return Scheme::GeneralizedAlpha;
    if (name == "bathe") return Scheme::Bathe;
    if (name == "edalpha" || name == "ed_alpha") return Scheme::EDAlpha;
    if (name == "moreau") return Scheme::Moreau;
    throw Error("unknown integrator '" + name + "' (expected galpha, bathe, edalpha or moreau)");
}

std::string scheme_name(Scheme s) {
    switch (s) {
        case Scheme::GeneralizedAlpha: return "galpha";
        case Scheme::Bathe: return "bathe";
        case Scheme::EDAlpha: return "edalpha";
        case Scheme::Moreau: return "moreau";
    }
    return "?";
}

static void check_rho(double rho_inf) {
    if (!(rho_inf >= 0.0 && rho_inf <= 1.0)) throw Error("rho_inf must lie in [0,1]");
}

GAlphaParams galpha_params(double rho_inf) {
    check_rho(rho_inf);
    GAlphaParams p;
    p.alpha_m = (2.0 * rho_inf - 1.0) / (rho_inf + 1.0);
    p.alpha_f = rho_inf / (rho_inf + 1.0);
    p.gamma = 0.5 - p.alpha_m + p.alpha_f;
    const double t = 1.0 - p.alpha_m + p.alpha_f;
    p.beta = 0.25 * t * t;
    return p;
}

EDParams ed_params(double rho_inf) {
    check_rho(rho_inf);
    return {(1.0 - rho_inf) / (1.0 + rho_inf), 1.0 / 6.0};
}

GAlphaParams IntegratorConfig::galpha_resolved() const { return galpha ? *galpha : galpha_params(rho_inf); }
EDParams IntegratorConfig::ed_resolved() const { return ed ? *ed : ed_params(rho_inf); }

std::vector<std::string> IntegratorConfig::check() const {
    std::vector<std::string> w;
    if (!(dt > 0.0)) throw Error("time step must be positive");
    if (scheme == Scheme::GeneralizedAlpha) {
        const GAlphaParams p = galpha_resolved();
        if (p.alpha_m == 1.0) throw Error("generalized-alpha: alpha_m = 1 is singular");
        if (!(p.alpha_m <= p.alpha_f && p.alpha_f <= 0.5) ||
            p.beta < 0.25 + 0.5 * (p.alpha_f - p.alpha_m)) {
            std::ostringstream os;
            os << "generalized-alpha parameters outside the unconditional stability region (alpha_m="
               << p.alpha_m << ", alpha_f=" << p.alpha_f << ", beta=" << p.beta << ")";
            w.push_back(os.str());
        }
    }
    if (scheme == Scheme::EDAlpha) {
        const EDParams p = ed_resolved();
        if (p.alpha_AR < 0.0) throw Error("ED-alpha: alpha_AR must be non-negative");
        if (p.alpha_AR == 0.0 || p.alpha == -1.0)
            throw Error("ED-alpha: the velocity-based stage elimination needs alpha_AR > 0 and alpha != -1");
    }
    return w;
}

}  // namespace nsmbs
