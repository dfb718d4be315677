#pragma once

#include <iosfwd>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "radwave/grid.hpp"
#include "radwave/model.hpp"
#include "radwave/wave_solver.hpp"

namespace radwave {

/// One evaluation of a functional inequality lhs <= C * rhs_factor.
struct InequalityVerdict {
    std::string name;
    double lhs = 0.0;
    double rhs_factor = 0.0;
    double ratio = 0.0;  // lhs / rhs_factor, 0 when both vanish
    std::map<std::string, double> params;
    std::string witness;
    std::vector<std::string> flags;  // "out-of-regime", "rescaled", "printed-A-discrepancy", ...
    std::size_t grid_cells = 0;

    bool has_flag(const std::string& f) const;
};

/// |x|^{(N-1)/2} |u| <= C |grad u|^{1/2} |u|^{1/2}. Throws on a zero field.
InequalityVerdict strauss_ratio(const RadialField& field);

/// int (e^{alpha u^2} - 1)/|x|^beta  vs  int u^2/|x|^beta, N = 2.
/// Fields with |grad u| > 1 are rescaled onto the unit sphere (flag "rescaled");
/// alpha outside (0, 2pi(2-beta)) is flagged "out-of-regime". beta >= 2 throws.
InequalityVerdict mt_subcritical_ratio(const RadialField& field, double alpha, double beta);

/// Moser profile: sqrt(log n / 2pi) on r <= 1/n, log(1/r)/sqrt(2pi log n) up to
/// r = 1, zero beyond; unit Dirichlet norm in the continuum. With beta > 0 the
/// radius is replaced by r^{(2-beta)/2} and the profile divided by
/// sqrt((2-beta)/2), which keeps the Dirichlet norm and turns the weight
/// |x|^{-beta} at exponent 2pi(2-beta) into the unweighted problem at 4pi.
RadialField moser_field(const RadialGrid& grid, int n, double beta = 0.0);

/// Radius of the Moser plateau for (n, beta).
double moser_plateau_radius(int n, double beta);

struct MoserSweepRow {
    int n = 0;
    double lhs = 0.0;  // +inf on overflow
    double h1_before_normalization = 0.0;
    double grad_norm = 0.0;
    std::size_t grid_cells = 0;
};

struct MoserSweepOptions {
    std::size_t plateau_cells = 32;  // cells across the finest plateau
    double r_max = 1.25;
    /// Use the beta-adapted radius r^{(2-beta)/2}. Its plateau n^{-2/(2-beta)}
    /// is unresolvable on a uniform grid as beta -> 2; the literal family
    /// (plateau 1/n) still shows the eps > 0 growth there.
    bool adapted = true;
    std::size_t max_cells = 20'000'000;
};

/// int (e^{(2pi(2-beta)+eps) u^2} - 1)/|x|^beta along u = m_n / |m_n|_{H^1}.
std::vector<MoserSweepRow> mt_sharpness_sweep(double beta, double eps, const std::vector<int>& n_list,
                                              const MoserSweepOptions& opts = {});

struct MtSupremumSearch {
    double value = 0.0;         // best lower bound found for the H^1-unit supremum
    double plateau_height = 0.0;
    double inner_radius = 0.0;
    double outer_radius = 0.0;
    int iterations = 0;
};

/// Coordinate ascent over truncated-log profiles (plateau height, inner and
/// outer radius) normalized to |u|_{H^1} = 1. A lower bound, never a certificate.
MtSupremumSearch mt_supremum_lower_bound(double beta, int max_iterations = 200);

struct GnExponents {
    double A = 0.0;
    double B = 0.0;
    double printed_A = 0.0;  // 2 + theta - (N-2) lambda / 2
    bool valid = false;
};

/// B = N(lambda-2)/2 - theta, A = lambda - B. `valid` iff theta >= 0,
/// lambda >= 2 + 2 theta/(N-1) and, for N >= 3, lambda <= (2N + 2 theta)/(N-2).
GnExponents gn_exponents(int dim, double theta, double lambda);

/// Text comparing the homogeneous exponent A with the alternative printed form.
std::string gn_discrepancy_report(int dim, double theta, double lambda);

/// int |x|^theta |u|^lambda  vs  |u|_2^A |grad u|_2^B.
InequalityVerdict gn_ratio(const RadialField& field, double theta, double lambda);

struct KAlphaOptions {
    std::size_t scan_points = 20001;
    int max_widenings = 3;
};

struct KAlphaResult {
    double value = 0.0;
    double argmax = 0.0;
    double window_lo = 0.0;
    double window_hi = 0.0;
    int widenings = 0;
};

/// (e^s - 1 - s) / (e^{alpha s^2} - 1), with the removable value 1/(2 alpha) at 0.
double k_alpha_integrand(double alpha, double s);

/// sup_s of k_alpha_integrand: uniform scan of [-50, 50/min(alpha,1)] then
/// golden-section refinement around the best bracket.
KAlphaResult k_alpha(double alpha, const KAlphaOptions& opts = {});

/// max over nodes of |x|^b |e^u - 1 - u| / (|u|_{H^1}^{2b} (|u|^{2(1-b)} + e^{alpha u^2} - 1)).
InequalityVerdict tech2d_ratio(const RadialField& field, double b, double alpha);

struct StrichartzDiagnostic {
    double lhs = 0.0;            // |u|_{L^q_T L^r}
    double data_gradient = 0.0;  // |grad u(0)|_2
    double data_velocity = 0.0;  // |u_t(0)|_2
    double forcing = 0.0;        // |r^b f(u) - m u|_{L^{q'}_T L^{r'}}
    double rhs_factor = 0.0;
    double ratio = 0.0;
};

/// Both sides of the Strichartz estimate on a trajectory with stored snapshots.
StrichartzDiagnostic strichartz_diagnostic(const Trajectory& traj, const ModelSpec& spec, double q, double r);

/// `name,param_json,lhs,rhs_factor,ratio,grid_cells`
void write_verdicts_csv(std::ostream& os, const std::vector<InequalityVerdict>& verdicts);
inline constexpr const char* kVerdictCsvHeader = "name,param_json,lhs,rhs_factor,ratio,grid_cells";

}  // namespace radwave
