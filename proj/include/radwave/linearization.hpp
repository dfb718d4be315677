#pragma once

#include <exception>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "radwave/model.hpp"
#include "radwave/wave_solver.hpp"

namespace radwave {

/// A row whose solver runs failed a quality gate (energy drift).
class GateError : public Error {
public:
    using Error::Error;
};

/// Bump data (u0, u1) = (amplitude, velocity_amplitude) * exp(-1/(1 - (r/R0)^2)).
struct BaseData {
    double amplitude = 1.0;
    double radius = 1.0;
    double velocity_amplitude = 0.0;
};

/// How a linearization grid is sized: `cells_per_support` cells across the
/// finest concentrated support R0/n_finest (and never fewer than
/// `min_cells_per_radius` across R0), r_max = R0 + T + wall_cells * dr.
struct GridPolicy {
    int cells_per_support = 64;
    int finest_n = 1;
    // Coarser grids let the leapfrog precursor reach the 8-cell wall margin.
    int min_cells_per_radius = 512;
    int wall_cells = 8;
    double cfl = 0.5;
    std::size_t snapshot_stride = 10;
    double drift_gate = 1e-3;

    RadialGrid grid_for(int dim, const BaseData& data, double T) const;
    GridPolicy refined() const;
};

struct LinearizationRow {
    int n = 0;
    double sup_diff_e0 = 0.0;
    double u_l2_spacetime = 0.0;
    double u_l4b_spacetime = 0.0;  // L^{4(1-b)} space-time norm (2D); NaN in 3D
    double strichartz_qr = 0.0;    // L^q_T L^r with the power-case pair (3D); NaN in 2D
    double data_h1 = 0.0;
    double data_l2 = 0.0;
    double data_velocity_l2 = 0.0;
    double total_energy = 0.0;
    double drift_nonlinear = 0.0;
    double drift_linear = 0.0;
    std::size_t grid_cells = 0;
    double runtime_s = 0.0;
    std::optional<double> coarse_sup_diff_e0;  // same row on the unrefined grid
    bool converged = true;
    std::string verdict = "ok";
};

/// Evolves u_n (spec) and v_n (linear, same N and m) from the concentrated
/// data on one grid with one dt and records sup_t E_0(u_n - v_n).
/// Throws ResolutionError, GateError, or the solver's numerical errors.
LinearizationRow run_pair(const ModelSpec& spec, const BaseData& base, int n, double T, const GridPolicy& policy);

struct SweepOptions {
    GridPolicy policy;
    bool refine_check = true;       // rerun each row on a 2x grid
    double convergence_tol = 0.10;  // relative change allowed under refinement
    double trend_ratio = 0.5;       // last/first sup_diff_e0
    int threads = 1;
};

struct SweepResult {
    std::vector<LinearizationRow> rows;  // in n order; partial on abort
    std::string verdict;                 // "consistent" | "inconsistent" | "insufficient"
    bool sup_diff_trend_ok = false;
    bool all_converged = false;
    std::optional<bool> l2_decreasing;        // 2D
    std::optional<bool> strichartz_bounded;   // 3D
    double energy_bound = 0.0;
    bool energy_bound_ok = false;
    std::vector<std::string> notes;
    std::exception_ptr error;  // first row failure, if any
    std::string error_message;

    bool passed() const;
};

SweepResult sweep(const ModelSpec& spec, const BaseData& base, const std::vector<int>& n_list, double T,
                  const SweepOptions& opts);

/// sup_diff_e0 non-increasing from its maximum and last/first <= ratio.
bool trend_consistent(const std::vector<double>& values, double ratio);

/// max/median <= 2 and median/min <= 2.
bool bounded_about_median(const std::vector<double>& values, double factor = 2.0);

/// `n,sup_diff_e0,u_l2_spacetime,u_l4b_spacetime,strichartz_qr,data_h1,data_l2,grid_cells,verdict`
void write_sweep_csv(std::ostream& os, const SweepResult& result);
inline constexpr const char* kSweepCsvHeader =
    "n,sup_diff_e0,u_l2_spacetime,u_l4b_spacetime,strichartz_qr,data_h1,data_l2,grid_cells,verdict";

}  // namespace radwave
