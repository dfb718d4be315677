#include "radwave/model.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "radwave/errors.hpp"

namespace radwave {

std::string_view to_string(NonlinearityKind kind) {
    switch (kind) {
        case NonlinearityKind::Exp2D: return "exp2d";
        case NonlinearityKind::Power3D: return "power3d";
        case NonlinearityKind::Linear: return "linear";
    }
    return "?";
}

NonlinearityKind parse_kind(std::string_view name) {
    if (name == "exp2d") return NonlinearityKind::Exp2D;
    if (name == "power3d") return NonlinearityKind::Power3D;
    if (name == "linear") return NonlinearityKind::Linear;
    throw DomainError("unknown nonlinearity kind '" + std::string(name) +
                      "' (expected exp2d, power3d or linear)");
}

ModelSpec ModelSpec::exp2d(double b) {
    return ModelSpec{.dim = 2, .b = b, .mass = 1.0, .kind = NonlinearityKind::Exp2D, .p = 0.0};
}

ModelSpec ModelSpec::power3d(double b, double p) {
    return ModelSpec{.dim = 3, .b = b, .mass = 0.0, .kind = NonlinearityKind::Power3D, .p = p};
}

ModelSpec ModelSpec::linear(int dim, double mass) {
    return ModelSpec{.dim = dim, .b = 0.0, .mass = mass, .kind = NonlinearityKind::Linear, .p = 0.0};
}

void check_invariants(const ModelSpec& spec) {
    if (spec.dim != 2 && spec.dim != 3)
        throw DomainError("unsupported dimension " + std::to_string(spec.dim));
    if (spec.mass != 0.0 && spec.mass != 1.0) throw DomainError("mass term m must be 0 or 1");
    if (!(spec.b >= 0.0) || !std::isfinite(spec.b)) throw DomainError("weight exponent b must be >= 0");
    switch (spec.kind) {
        case NonlinearityKind::Exp2D:
            if (spec.dim != 2 || spec.mass != 1.0)
                throw DomainError("exp2d nonlinearity requires dim = 2 and m = 1");
            break;
        case NonlinearityKind::Power3D:
            if (spec.dim != 3 || spec.mass != 0.0)
                throw DomainError("power3d nonlinearity requires dim = 3 and m = 0");
            if (!(spec.p > 1.0) || !std::isfinite(spec.p))
                throw DomainError("power3d nonlinearity requires p > 1");
            break;
        case NonlinearityKind::Linear: break;
    }
}

namespace {

// sum_{k >= first} u^k / k!, for |u| < 0.1 only.
double exp_tail(double u, int first) {
    double term = 1.0;
    for (int k = 1; k <= first; ++k) term *= u / k;
    double sum = 0.0;
    for (int k = first; k < first + 16; ++k) {
        sum += term;
        term *= u / (k + 1);
    }
    return sum;
}

void guard(double u) {
    if (u > kExpOverflowGuard) throw OverflowError(u);
}

}  // namespace

double f_eval(const ModelSpec& spec, double u) {
    switch (spec.kind) {
        case NonlinearityKind::Exp2D:
            guard(u);
            return std::abs(u) < 0.1 ? -exp_tail(u, 2) : -(std::expm1(u) - u);
        case NonlinearityKind::Power3D:
            return -std::pow(std::abs(u), spec.p - 1.0) * u;
        case NonlinearityKind::Linear: return 0.0;
    }
    return 0.0;
}

double F_eval(const ModelSpec& spec, double u) {
    switch (spec.kind) {
        case NonlinearityKind::Exp2D:
            guard(u);
            return std::abs(u) < 0.1 ? -exp_tail(u, 3) : -(std::expm1(u) - u - 0.5 * u * u);
        case NonlinearityKind::Power3D:
            return -std::pow(std::abs(u), spec.p + 1.0) / (spec.p + 1.0);
        case NonlinearityKind::Linear: return 0.0;
    }
    return 0.0;
}

std::string_view to_string(Criticality c) {
    switch (c) {
        case Criticality::MassSubcritical: return "mass-subcritical";
        case Criticality::MassCritical: return "mass-critical";
        case Criticality::InterCritical: return "inter-critical";
        case Criticality::EnergyCritical: return "energy-critical";
        case Criticality::EnergySupercritical: return "energy-supercritical";
    }
    return "?";
}

CriticalityReport critical_exponent(const ModelSpec& spec) {
    if (spec.kind != NonlinearityKind::Power3D)
        throw DomainError(std::string(to_string(spec.kind)) +
                          " model has no scaling invariance; critical exponent undefined");
    const double n = spec.dim;
    CriticalityReport rep;
    rep.s_c = n / 2.0 - (2.0 + spec.b) / (spec.p - 1.0);
    rep.p_mass_critical = (n + 4.0 + 2.0 * spec.b) / n;
    if (spec.dim >= 3) rep.p_energy_critical = (n + 2.0 + 2.0 * spec.b) / (n - 2.0);

    constexpr double snap = 1e-12;
    if (std::abs(rep.s_c) <= snap) {
        rep.s_c = 0.0;
        rep.classification = Criticality::MassCritical;
    } else if (std::abs(rep.s_c - 1.0) <= snap) {
        rep.s_c = 1.0;
        rep.classification = Criticality::EnergyCritical;
    } else if (rep.s_c < 0.0) {
        rep.classification = Criticality::MassSubcritical;
    } else if (rep.s_c < 1.0) {
        rep.classification = Criticality::InterCritical;
    } else {
        rep.classification = Criticality::EnergySupercritical;
    }
    return rep;
}

std::vector<HypothesisViolation> validate_hypotheses(const ModelSpec& spec) {
    std::vector<HypothesisViolation> out;
    auto fail = [&](std::string theorem, std::string condition, double lhs, double rhs) {
        std::ostringstream os;
        os << condition << " fails: " << lhs << " vs " << rhs;
        out.push_back({std::move(theorem), std::move(condition), os.str()});
    };
    const std::string gwp2d = "2D global well-posedness (N=2, 0 <= b <= 1/2, exponential f)";
    const std::string gwp3d = "3D global well-posedness (N=3, b > 0, 1+b <= p < 4+b)";

    switch (spec.kind) {
        case NonlinearityKind::Exp2D:
            if (spec.dim != 2) fail(gwp2d, "N = 2", spec.dim, 2);
            if (!(spec.b >= 0.0)) fail(gwp2d, "b >= 0", spec.b, 0.0);
            if (!(spec.b <= 0.5)) fail(gwp2d, "b <= 1/2", spec.b, 0.5);
            break;
        case NonlinearityKind::Power3D:
            if (spec.dim != 3) fail(gwp3d, "N = 3", spec.dim, 3);
            if (!(spec.b > 0.0)) fail(gwp3d, "b > 0", spec.b, 0.0);
            if (!(spec.p >= 1.0 + spec.b)) fail(gwp3d, "p >= 1+b", spec.p, 1.0 + spec.b);
            if (!(spec.p < 4.0 + spec.b)) fail(gwp3d, "p < 4+b", spec.p, 4.0 + spec.b);
            break;
        case NonlinearityKind::Linear: break;
    }
    return out;
}

bool admissible_pair_check(double q, double r) {
    if (!(q > 2.0)) return false;  // also rejects nan
    if (!(r >= 6.0) || !std::isfinite(r)) return false;
    const double inv_q = std::isinf(q) ? 0.0 : 1.0 / q;
    return std::abs(inv_q + 3.0 / r - 0.5) <= 1e-12;
}

std::pair<double, double> strichartz_pair(double p, double b) {
    return {2.0 / (p - b - 3.0), 6.0 / (4.0 + b - p)};
}

}  // namespace radwave
