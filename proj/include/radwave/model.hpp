#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace radwave {

enum class NonlinearityKind { Exp2D, Power3D, Linear };

std::string_view to_string(NonlinearityKind kind);
NonlinearityKind parse_kind(std::string_view name);

/// Parameters of  u_tt - Laplace(u) + m u = |x|^b f(u).
///
/// Exp2D:   N = 2, m = 1, f(u) = -(e^u - 1 - u)
/// Power3D: N = 3, m = 0, f(u) = -|u|^{p-1} u
/// Linear:  f = 0, any N, m in {0, 1}
struct ModelSpec {
    int dim = 2;
    double b = 0.0;
    double mass = 1.0;
    NonlinearityKind kind = NonlinearityKind::Linear;
    double p = 0.0;  // Power3D only

    static ModelSpec exp2d(double b);
    static ModelSpec power3d(double b, double p);
    static ModelSpec linear(int dim, double mass);

    /// Same dimension and mass, nonlinearity switched off.
    ModelSpec linearized() const { return linear(dim, mass); }

    friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

/// Throws DomainError if the kind/dim/mass combination is not allowed.
void check_invariants(const ModelSpec& spec);

/// e^u guard shared by f_eval / F_eval.
inline constexpr double kExpOverflowGuard = 700.0;

double f_eval(const ModelSpec& spec, double u);
/// Primitive of f with F(0) = 0.
double F_eval(const ModelSpec& spec, double u);

enum class Criticality {
    MassSubcritical,
    MassCritical,
    InterCritical,
    EnergyCritical,
    EnergySupercritical,
};

std::string_view to_string(Criticality c);

struct CriticalityReport {
    double s_c = 0.0;
    double p_mass_critical = 0.0;
    std::optional<double> p_energy_critical;  // N >= 3
    Criticality classification = Criticality::InterCritical;
};

/// s_c = N/2 - (2+b)/(p-1). Only the power nonlinearity is scale invariant;
/// other kinds throw DomainError.
CriticalityReport critical_exponent(const ModelSpec& spec);

struct HypothesisViolation {
    std::string theorem;    // which well-posedness result
    std::string condition;  // the failed inequality, e.g. "p < 4+b"
    std::string detail;
};

/// Empty result means the spec sits inside the global well-posedness range:
/// 2D exponential with 0 <= b <= 1/2, 3D power with b > 0, 1+b <= p < 4+b.
std::vector<HypothesisViolation> validate_hypotheses(const ModelSpec& spec);

/// 3D H^1 wave-admissibility: 1/q + 3/r = 1/2, 2 < q <= inf, 6 <= r < inf.
bool admissible_pair_check(double q, double r);

/// (q, r) = (2/(p-b-3), 6/(4+b-p)), the Strichartz pair used for the 3D power case.
std::pair<double, double> strichartz_pair(double p, double b);

}  // namespace radwave
