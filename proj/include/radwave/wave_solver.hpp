#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "radwave/grid.hpp"
#include "radwave/model.hpp"

namespace radwave {

/// (u, u_t) on one grid at time t.
struct FieldState {
    RadialField u;
    RadialField v;
    double t = 0.0;

    FieldState(RadialField u_, RadialField v_, double t_ = 0.0);
    const RadialGrid& grid() const noexcept { return u.grid(); }
};

struct EnergyReport {
    double t = 0.0;
    double total = 0.0;
    double kinetic_e0 = 0.0;  // 1/2 (|u_t|^2 + |u_r|^2 + m |u|^2)
    double potential = 0.0;   // -int |x|^b F(u)
    double support_radius = 0.0;
};

/// Semi-discrete radial operator
///   L u = u_rr + (N-1)/r u_r - m u + r^b f(u)
/// with centered differences, the ghost-node origin row 2N (u_1 - u_0)/dr^2
/// and u = 0 at r_max.
///
/// The stencil is the gradient of a discrete energy: with mass weights
/// W_j = r_j^{N-1} dr (W_0 = dr^2/8 in 2D, 0 in 3D) and edge weights
/// S_{j+1/2} = r_{j+1/2} (2D) or r_j r_{j+1} (3D),
///   E_h = omega [ 1/2 sum W v^2 + 1/2 sum S (u_{j+1}-u_j)^2 / dr
///                 + m/2 sum W u^2 - sum W r^b F(u) ]
/// and W_j (L u)_j = -dE_h/du_j. Leapfrog keeps E_h within O(dt^2).
class RadialWaveOperator {
public:
    RadialWaveOperator(const RadialGrid& grid, const ModelSpec& spec);

    const RadialGrid& grid() const noexcept { return grid_; }
    const ModelSpec& spec() const noexcept { return spec_; }

    /// out = L u. Throws OverflowError annotated with (t, r).
    void apply(std::span<const double> u, std::span<double> out, double t) const;

    EnergyReport energy(const FieldState& state, double support_threshold = 0.0) const;

    /// 1/2 (|v|^2 + |u_r|^2 + m |u|^2) in the discrete inner products.
    double kinetic(std::span<const double> u, std::span<const double> v) const;
    double potential(std::span<const double> u) const;

    std::span<const double> mass_weights() const noexcept { return mass_w_; }
    std::span<const double> edge_weights() const noexcept { return edge_w_; }

    /// Largest stable cfl = dt/dr for leapfrog on this operator.
    double max_stable_cfl() const noexcept;

private:
    RadialGrid grid_;
    ModelSpec spec_;
    std::vector<double> c_plus_, c_minus_, c_diag_;  // linear stencil rows
    std::vector<double> r_pow_b_;
    std::vector<double> mass_w_;  // W_j
    std::vector<double> edge_w_;  // S_{j+1/2}, j = 0..M-1
};

/// Smallest stable dt/dr for the radial stencil in `dim` dimensions with mass m.
double max_stable_cfl(int dim, double mass, double dr);

/// Bump u0(r) = amplitude exp(-1/(1 - (r/R0)^2)) for r < R0; u1 the same
/// profile scaled by velocity_amplitude (default 0).
std::pair<RadialField, RadialField> initial_bump(const RadialGrid& grid, double amplitude, double radius,
                                                 double velocity_amplitude = 0.0);

/// phi_n(r) = n^{N/2-1} phi(n r), psi_n(r) = n^{N/2} psi(n r), sampled at
/// nodes exactly (n r_j = r_{nj}). Needs >= 16 cells across the scaled support.
std::pair<RadialField, RadialField> concentrate(const std::pair<RadialField, RadialField>& data, int n);

/// Largest radius where the data (u or v) is nonzero, plus one cell: the first
/// node known to be outside the support.
double data_support(const RadialField& u, const RadialField& v);

/// One velocity Verlet step (= leapfrog): v += dt/2 L u; u += dt v; v += dt/2 L u.
/// Exactly reversible under v -> -v up to roundoff.
FieldState step(const FieldState& state, const ModelSpec& spec, double dt);

/// Owns a state and advances it, reusing L u between the two half kicks.
class Integrator {
public:
    Integrator(const ModelSpec& spec, FieldState initial, double dt);

    void advance();
    const FieldState& state() const noexcept { return state_; }
    const RadialWaveOperator& op() const noexcept { return op_; }
    double dt() const noexcept { return dt_; }

private:
    RadialWaveOperator op_;
    FieldState state_;
    double dt_;
    double t0_;
    std::size_t steps_ = 0;  // t = t0 + steps * dt, no accumulated rounding
    std::vector<double> accel_;
};

/// Space-time norm (int_0^T |u(t)|_{L^r}^q dt)^{1/q} accumulated during evolve.
struct MixedNormRequest {
    std::string name;
    double q = 2.0;
    double r = 2.0;
};

struct EvolveOptions {
    double T = 1.0;
    double cfl = 0.5;
    std::size_t snapshot_stride = 10;
    bool store_snapshots = false;
    /// |u| or |v| above this fraction of the data's sup counts as support.
    double support_rel_threshold = 1e-8;
    std::vector<MixedNormRequest> mixed_norms;
};

struct Trajectory {
    explicit Trajectory(RadialGrid g) : grid(std::move(g)) {}

    RadialGrid grid;
    double dt = 0.0;
    std::vector<double> times;
    std::vector<EnergyReport> reports;
    std::vector<double> l2_spacetime_partial;  // sqrt(int_0^t |u|^2) at each snapshot
    std::vector<FieldState> snapshots;         // when requested
    std::vector<std::pair<MixedNormRequest, double>> mixed_norms;
    double max_relative_drift = 0.0;
    std::optional<FieldState> final_state;

    double l2_spacetime() const { return l2_spacetime_partial.empty() ? 0.0 : l2_spacetime_partial.back(); }
    double mixed_norm(const std::string& name) const;
};

/// Integrates to T. Throws CflError, OverflowError (with location) or
/// WallProximityError when r_max < R0 + T + 4 dr or the support comes within
/// 2 dr of the wall.
Trajectory evolve(const FieldState& initial, const ModelSpec& spec, const EvolveOptions& opts);

EnergyReport energy(const FieldState& state, const ModelSpec& spec);

/// E_0(a - b) with mass m, in the solver's discrete inner products.
double diff_energy(const FieldState& a, const FieldState& b, double mass);

/// `t,total,kinetic_e0,potential,support_radius,l2_spacetime_partial`
void write_energy_csv(std::ostream& os, const Trajectory& traj);
inline constexpr const char* kEnergyCsvHeader =
    "t,total,kinetic_e0,potential,support_radius,l2_spacetime_partial";

}  // namespace radwave
