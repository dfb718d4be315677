#include "radwave/wave_solver.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace radwave {

FieldState::FieldState(RadialField u_, RadialField v_, double t_)
    : u(std::move(u_)), v(std::move(v_)), t(t_) {
    if (!(u.grid() == v.grid())) throw DomainError("u and u_t must share one grid");
}

RadialWaveOperator::RadialWaveOperator(const RadialGrid& grid, const ModelSpec& spec)
    : grid_(grid), spec_(spec) {
    check_invariants(spec);
    if (spec.dim != grid.dim())
        throw DomainError("model dimension " + std::to_string(spec.dim) + " does not match grid dimension " +
                          std::to_string(grid.dim()));
    const std::size_t m = grid.num_cells();
    const double dr = grid.spacing();
    const double inv_dr2 = 1.0 / (dr * dr);
    const int n = grid.dim();

    c_plus_.assign(m + 1, 0.0);
    c_minus_.assign(m + 1, 0.0);
    c_diag_.assign(m + 1, 0.0);
    c_plus_[0] = 2.0 * n * inv_dr2;
    c_diag_[0] = -2.0 * n * inv_dr2 - spec.mass;
    for (std::size_t j = 1; j < m; ++j) {
        const double skew = (n - 1) / (2.0 * static_cast<double>(j));
        c_plus_[j] = (1.0 + skew) * inv_dr2;
        c_minus_[j] = (1.0 - skew) * inv_dr2;
        c_diag_[j] = -2.0 * inv_dr2 - spec.mass;
    }

    r_pow_b_.assign(m + 1, 0.0);
    for (std::size_t j = 0; j <= m; ++j) {
        const double r = grid.node(j);
        r_pow_b_[j] = (r == 0.0) ? (spec.b == 0.0 ? 1.0 : 0.0) : std::pow(r, spec.b);
    }

    mass_w_.assign(m + 1, 0.0);
    mass_w_[0] = (n == 2) ? dr * dr / 8.0 : 0.0;
    for (std::size_t j = 1; j <= m; ++j) mass_w_[j] = std::pow(grid.node(j), n - 1) * dr;
    mass_w_[m] *= 0.5;

    edge_w_.assign(m, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
        const double lo = grid.node(j);
        const double hi = grid.node(j + 1);
        edge_w_[j] = (n == 2) ? 0.5 * (lo + hi) : lo * hi;
    }
}

void RadialWaveOperator::apply(std::span<const double> u, std::span<double> out, double t) const {
    const std::size_t m = grid_.num_cells();
    const bool nonlinear = spec_.kind != NonlinearityKind::Linear;
    std::size_t j = 0;
    try {
        out[0] = c_plus_[0] * u[1] + c_diag_[0] * u[0];
        if (nonlinear) out[0] += r_pow_b_[0] * f_eval(spec_, u[0]);
        for (j = 1; j < m; ++j) {
            double a = c_plus_[j] * u[j + 1] + c_minus_[j] * u[j - 1] + c_diag_[j] * u[j];
            if (nonlinear) a += r_pow_b_[j] * f_eval(spec_, u[j]);
            out[j] = a;
        }
        out[m] = 0.0;
    } catch (const OverflowError& e) {
        throw e.located(t, grid_.node(j));
    }
}

double RadialWaveOperator::kinetic(std::span<const double> u, std::span<const double> v) const {
    const std::size_t m = grid_.num_cells();
    const double dr = grid_.spacing();
    double vel = 0.0, mass = 0.0, grad = 0.0;
    for (std::size_t j = 0; j <= m; ++j) {
        vel += mass_w_[j] * v[j] * v[j];
        mass += mass_w_[j] * u[j] * u[j];
    }
    for (std::size_t j = 0; j < m; ++j) {
        const double d = u[j + 1] - u[j];
        grad += edge_w_[j] * d * d;
    }
    grad /= dr;
    return 0.5 * grid_.sphere_area() * (vel + grad + spec_.mass * mass);
}

double RadialWaveOperator::potential(std::span<const double> u) const {
    if (spec_.kind == NonlinearityKind::Linear) return 0.0;
    const std::size_t m = grid_.num_cells();
    double sum = 0.0;
    for (std::size_t j = 0; j <= m; ++j) {
        if (mass_w_[j] == 0.0 || r_pow_b_[j] == 0.0) continue;
        sum += mass_w_[j] * r_pow_b_[j] * F_eval(spec_, u[j]);
    }
    return -grid_.sphere_area() * sum;
}

EnergyReport RadialWaveOperator::energy(const FieldState& state, double support_threshold) const {
    EnergyReport rep;
    rep.t = state.t;
    rep.kinetic_e0 = kinetic(state.u.values(), state.v.values());
    try {
        rep.potential = potential(state.u.values());
    } catch (const OverflowError& e) {
        throw OverflowError(e.value(), state.t);
    }
    rep.total = rep.kinetic_e0 + rep.potential;
    rep.support_radius =
        std::max(support_radius(state.u, support_threshold), support_radius(state.v, support_threshold));
    return rep;
}

double max_stable_cfl(int dim, double mass, double dr) {
    // Spectral radius of the linear stencil times dr^2: the 2D value is the
    // large-M limit of the origin-coupled rows, the 3D value is the decoupled
    // origin row 6/dr^2.
    const double lambda = (dim == 2) ? 4.8420 : 6.0;
    const double dt_max = 2.0 / std::sqrt(lambda / (dr * dr) + mass);
    return dt_max / dr;
}

double RadialWaveOperator::max_stable_cfl() const noexcept {
    return radwave::max_stable_cfl(grid_.dim(), spec_.mass, grid_.spacing());
}

std::pair<RadialField, RadialField> initial_bump(const RadialGrid& grid, double amplitude, double radius,
                                                 double velocity_amplitude) {
    if (!(radius > 0.0)) throw DomainError("bump radius must be positive");
    if (!(radius < grid.r_max()))
        throw DomainError("bump radius R0 must be smaller than r_max");
    auto profile = [radius](double r) {
        if (r >= radius) return 0.0;
        const double x = r / radius;
        return std::exp(-1.0 / (1.0 - x * x));
    };
    auto u0 = RadialField::sample(grid, [&](double r) { return amplitude * profile(r); });
    auto u1 = RadialField::sample(grid, [&](double r) { return velocity_amplitude * profile(r); });
    return {std::move(u0), std::move(u1)};
}

double data_support(const RadialField& u, const RadialField& v) {
    const auto& g = u.grid();
    for (std::size_t j = u.size(); j-- > 0;)
        if (u[j] != 0.0 || v[j] != 0.0) return std::min(g.node(j) + g.spacing(), g.r_max());
    return 0.0;
}

std::pair<RadialField, RadialField> concentrate(const std::pair<RadialField, RadialField>& data, int n) {
    const auto& [phi, psi] = data;
    const auto& g = phi.grid();
    if (!(g == psi.grid())) throw DomainError("concentrate: data fields on different grids");
    if (n < 1) throw DomainError("concentration index n must be >= 1");
    const double support = data_support(phi, psi);
    const double cells = support / (n * g.spacing());
    if (support > 0.0 && cells < 16.0) {
        std::ostringstream os;
        os << "concentration n = " << n << " leaves " << cells
           << " cells across the scaled support (need >= 16); refine the grid";
        throw ResolutionError(os.str());
    }
    const double half_dim = 0.5 * g.dim();
    const double su = std::pow(static_cast<double>(n), half_dim - 1.0);
    const double sv = std::pow(static_cast<double>(n), half_dim);
    RadialField u(g), v(g);
    const std::size_t m = g.num_cells();
    for (std::size_t j = 0; j <= m && j * static_cast<std::size_t>(n) <= m; ++j) {
        const std::size_t k = j * static_cast<std::size_t>(n);
        u[j] = su * phi[k];
        v[j] = sv * psi[k];
    }
    return {std::move(u), std::move(v)};
}

namespace {

void check_step(const RadialWaveOperator& op, double dt) {
    const double dr = op.grid().spacing();
    if (!(dt > 0.0)) throw CflError("time step must be positive");
    const double limit = op.max_stable_cfl();
    if (dt / dr > limit * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "CFL violation: dt/dr = " << dt / dr << " exceeds the stencil's stability limit " << limit;
        throw CflError(os.str());
    }
}

}  // namespace

FieldState step(const FieldState& state, const ModelSpec& spec, double dt) {
    Integrator integ(spec, state, dt);
    integ.advance();
    return integ.state();
}

Integrator::Integrator(const ModelSpec& spec, FieldState initial, double dt)
    : op_(initial.grid(), spec), state_(std::move(initial)), dt_(dt), t0_(state_.t),
      accel_(state_.u.size(), 0.0) {
    check_step(op_, dt);
    op_.apply(state_.u.values(), accel_, state_.t);
}

void Integrator::advance() {
    auto u = state_.u.values();
    auto v = state_.v.values();
    const std::size_t m = u.size() - 1;
    const double half = 0.5 * dt_;
    for (std::size_t j = 0; j < m; ++j) {
        v[j] += half * accel_[j];
        u[j] += dt_ * v[j];
    }
    u[m] = 0.0;
    v[m] = 0.0;
    state_.t = t0_ + static_cast<double>(++steps_) * dt_;
    op_.apply(u, accel_, state_.t);
    for (std::size_t j = 0; j < m; ++j) v[j] += half * accel_[j];
    for (std::size_t j = 0; j <= m; ++j) {
        if (!std::isfinite(u[j]) || !std::isfinite(v[j])) {
            std::ostringstream os;
            os << "solution became non-finite at t = " << state_.t << ", r = " << op_.grid().node(j);
            throw NonFiniteError(os.str(), j);
        }
    }
}

double Trajectory::mixed_norm(const std::string& name) const {
    for (const auto& [req, value] : mixed_norms)
        if (req.name == name) return value;
    throw DomainError("no mixed norm named '" + name + "' was accumulated");
}

namespace {

// Trapezoid quadrature weights omega r^{N-1} dr (halved at both ends).
std::vector<double> quadrature_weights(const RadialGrid& g) {
    const std::size_t m = g.num_cells();
    std::vector<double> w(m + 1);
    for (std::size_t j = 0; j <= m; ++j) {
        const double r = g.node(j);
        w[j] = g.sphere_area() * g.spacing() * std::pow(r, g.dim() - 1) * ((j == 0 || j == m) ? 0.5 : 1.0);
    }
    return w;
}

double power_sum(std::span<const double> w, std::span<const double> u, double r) {
    double s = 0.0;
    if (r == 2.0) {
        for (std::size_t j = 0; j < u.size(); ++j) s += w[j] * u[j] * u[j];
    } else {
        for (std::size_t j = 0; j < u.size(); ++j)
            if (u[j] != 0.0) s += w[j] * std::pow(std::abs(u[j]), r);
    }
    return s;
}

// |u|_{L^r}^q
double lr_power(std::span<const double> w, std::span<const double> u, double q, double r) {
    const double s = power_sum(w, u, r);
    return (q == r) ? s : std::pow(s, q / r);
}

}  // namespace

Trajectory evolve(const FieldState& initial, const ModelSpec& spec, const EvolveOptions& opts) {
    check_invariants(spec);
    const RadialGrid& g = initial.grid();
    const double dr = g.spacing();
    if (!(opts.T > 0.0)) throw DomainError("final time T must be positive");
    if (!(opts.cfl > 0.0) || opts.cfl > 1.0) throw CflError("cfl must lie in (0, 1]");
    if (opts.snapshot_stride == 0) throw DomainError("snapshot_stride must be >= 1");
    for (const auto& req : opts.mixed_norms)
        if (!(req.q >= 1.0) || !(req.r >= 1.0) || std::isinf(req.q))
            throw DomainError("mixed norm '" + req.name + "' needs finite q >= 1 and r >= 1");

    const double threshold = opts.support_rel_threshold * std::max(initial.u.sup_abs(), initial.v.sup_abs());
    const double r_supp = std::max(support_radius(initial.u, threshold), support_radius(initial.v, threshold));
    const double r0 = (threshold > 0.0) ? std::min(r_supp + dr, g.r_max()) : 0.0;
    if (g.r_max() < r0 + opts.T + 4.0 * dr) {
        std::ostringstream os;
        os << "r_max = " << g.r_max() << " < R0 + T + 4 dr = " << r0 + opts.T + 4.0 * dr
           << "; the wall would influence the solution";
        throw WallProximityError(os.str());
    }

    const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(opts.T / (opts.cfl * dr) - 1e-9)));
    const double dt = opts.T / static_cast<double>(steps);
    Integrator integ(spec, initial, dt);

    Trajectory traj(g);
    traj.dt = dt;
    const auto w = quadrature_weights(g);
    std::vector<double> acc(opts.mixed_norms.size(), 0.0);
    double l2_acc = 0.0;
    double e0 = 0.0;

    // Time trapezoid: segment k adds dt/2 (g_{k-1} + g_k).
    std::vector<double> prev(acc.size(), 0.0);
    double prev_l2 = 0.0;
    auto accumulate = [&](const FieldState& s, bool first) {
        const double l2 = power_sum(w, s.u.values(), 2.0);
        if (!first) l2_acc += 0.5 * dt * (prev_l2 + l2);
        prev_l2 = l2;
        for (std::size_t i = 0; i < acc.size(); ++i) {
            const double gi = lr_power(w, s.u.values(), opts.mixed_norms[i].q, opts.mixed_norms[i].r);
            if (!first) acc[i] += 0.5 * dt * (prev[i] + gi);
            prev[i] = gi;
        }
    };
    auto record = [&](const FieldState& s) {
        EnergyReport rep = integ.op().energy(s, threshold);
        if (traj.reports.empty()) e0 = rep.total;
        const double drift = (e0 != 0.0) ? std::abs(rep.total - e0) / std::abs(e0) : std::abs(rep.total - e0);
        traj.max_relative_drift = std::max(traj.max_relative_drift, drift);
        traj.times.push_back(s.t);
        traj.reports.push_back(rep);
        traj.l2_spacetime_partial.push_back(std::sqrt(l2_acc));
        if (opts.store_snapshots) traj.snapshots.push_back(s);
    };

    accumulate(integ.state(), true);
    record(integ.state());
    const std::size_t m = g.num_cells();
    for (std::size_t k = 1; k <= steps; ++k) {
        integ.advance();
        const FieldState& s = integ.state();
        for (std::size_t j = m - 2; j < m; ++j) {
            if (std::abs(s.u[j]) > threshold || std::abs(s.v[j]) > threshold) {
                std::ostringstream os;
                os << "support reached r = " << g.node(j) << " at t = " << s.t << ", within 2 dr of r_max";
                throw WallProximityError(os.str());
            }
        }
        accumulate(s, false);
        if (k % opts.snapshot_stride == 0 || k == steps) record(s);
    }

    for (std::size_t i = 0; i < acc.size(); ++i)
        traj.mixed_norms.emplace_back(opts.mixed_norms[i], std::pow(acc[i], 1.0 / opts.mixed_norms[i].q));
    traj.final_state = integ.state();
    return traj;
}

EnergyReport energy(const FieldState& state, const ModelSpec& spec) {
    RadialWaveOperator op(state.grid(), spec);
    const double threshold = 1e-8 * std::max(state.u.sup_abs(), state.v.sup_abs());
    return op.energy(state, threshold);
}

double diff_energy(const FieldState& a, const FieldState& b, double mass) {
    if (!(a.grid() == b.grid())) throw DomainError("diff_energy: states live on different grids");
    RadialWaveOperator op(a.grid(), ModelSpec::linear(a.grid().dim(), mass));
    const RadialField du = a.u - b.u;
    const RadialField dv = a.v - b.v;
    return op.kinetic(du.values(), dv.values());
}

void write_energy_csv(std::ostream& os, const Trajectory& traj) {
    os << kEnergyCsvHeader << '\n';
    os << std::setprecision(17);
    for (std::size_t i = 0; i < traj.reports.size(); ++i) {
        const auto& r = traj.reports[i];
        os << r.t << ',' << r.total << ',' << r.kinetic_e0 << ',' << r.potential << ',' << r.support_radius
           << ',' << traj.l2_spacetime_partial[i] << '\n';
    }
}

}  // namespace radwave
