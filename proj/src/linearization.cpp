#include "radwave/linearization.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "radwave/inequalities.hpp"

namespace radwave {

RadialGrid GridPolicy::grid_for(int dim, const BaseData& data, double T) const {
    if (cells_per_support < 16) throw ResolutionError("cells_per_support must be >= 16");
    if (finest_n < 1) throw DomainError("finest_n must be >= 1");
    const int cells = std::max(finest_n * cells_per_support, min_cells_per_radius);
    const double dr = data.radius / static_cast<double>(cells);
    const auto total = static_cast<std::size_t>(std::ceil((data.radius + T) / dr - 1e-9)) +
                       static_cast<std::size_t>(wall_cells);
    return RadialGrid(dim, static_cast<double>(total) * dr, total);
}

GridPolicy GridPolicy::refined() const {
    GridPolicy p = *this;
    p.cells_per_support *= 2;
    p.min_cells_per_radius *= 2;
    return p;
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool has_strichartz_pair(const ModelSpec& spec) {
    if (spec.kind != NonlinearityKind::Power3D) return false;
    const auto [q, r] = strichartz_pair(spec.p, spec.b);
    return admissible_pair_check(q, r) && std::isfinite(q);
}

}  // namespace

LinearizationRow run_pair(const ModelSpec& spec, const BaseData& base, int n, double T, const GridPolicy& policy) {
    const auto t0 = std::chrono::steady_clock::now();
    check_invariants(spec);
    if (n < 1) throw DomainError("n must be >= 1");
    if (policy.snapshot_stride == 0 || policy.snapshot_stride > 10)
        throw DomainError("snapshot stride must lie in [1, 10] so the sup over time is resolved");
    GridPolicy pol = policy;
    pol.finest_n = std::max(pol.finest_n, n);
    const RadialGrid grid = pol.grid_for(spec.dim, base, T);

    auto data = initial_bump(grid, base.amplitude, base.radius, base.velocity_amplitude);
    auto [phi, psi] = concentrate(data, n);

    LinearizationRow row;
    row.n = n;
    row.grid_cells = grid.num_cells();
    row.data_h1 = h1_norm(phi);
    row.data_l2 = l2_norm(phi);
    row.data_velocity_l2 = l2_norm(psi);

    EvolveOptions opts;
    opts.T = T;
    opts.cfl = pol.cfl;
    opts.snapshot_stride = pol.snapshot_stride;
    opts.store_snapshots = true;
    const bool two_d = spec.dim == 2;
    if (two_d) {
        const double s = 4.0 * (1.0 - spec.b);
        if (s >= 1.0) opts.mixed_norms.push_back({"l4b", s, s});
    }
    if (has_strichartz_pair(spec)) {
        const auto [q, r] = strichartz_pair(spec.p, spec.b);
        opts.mixed_norms.push_back({"strichartz", q, r});
    }

    const FieldState initial(phi, psi);
    const Trajectory nonlinear = evolve(initial, spec, opts);
    EvolveOptions lin_opts = opts;
    lin_opts.mixed_norms.clear();
    const Trajectory linear = evolve(initial, spec.linearized(), lin_opts);

    row.drift_nonlinear = nonlinear.max_relative_drift;
    row.drift_linear = linear.max_relative_drift;
    if (row.drift_nonlinear > pol.drift_gate || row.drift_linear > pol.drift_gate) {
        std::ostringstream os;
        os << "n = " << n << ": energy drift gate " << pol.drift_gate << " failed (nonlinear "
           << row.drift_nonlinear << ", linear " << row.drift_linear << ")";
        throw GateError(os.str());
    }

    for (std::size_t k = 0; k < nonlinear.snapshots.size(); ++k)
        row.sup_diff_e0 = std::max(row.sup_diff_e0, diff_energy(nonlinear.snapshots[k], linear.snapshots[k], spec.mass));

    row.total_energy = nonlinear.reports.front().total;
    row.u_l2_spacetime = nonlinear.l2_spacetime();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    row.u_l4b_spacetime = (two_d && spec.b < 0.75) ? nonlinear.mixed_norm("l4b") : nan;
    row.strichartz_qr = has_strichartz_pair(spec) ? nonlinear.mixed_norm("strichartz") : nan;
    row.runtime_s = seconds_since(t0);
    return row;
}

bool trend_consistent(const std::vector<double>& values, double ratio) {
    if (values.size() < 2) return false;
    const auto peak = std::max_element(values.begin(), values.end());
    for (auto it = peak; it + 1 != values.end(); ++it)
        if (*(it + 1) > *it) return false;
    if (values.front() == 0.0) return values.back() == 0.0;
    return values.back() / values.front() <= ratio;
}

bool bounded_about_median(const std::vector<double>& values, double factor) {
    if (values.empty()) return false;
    std::vector<double> v = values;
    std::sort(v.begin(), v.end());
    const std::size_t k = v.size();
    const double median = (k % 2 == 1) ? v[k / 2] : 0.5 * (v[k / 2 - 1] + v[k / 2]);
    if (!(median > 0.0)) return false;
    return v.back() / median <= factor && median / v.front() <= factor;
}

bool SweepResult::passed() const {
    return !error && verdict == "consistent" && l2_decreasing.value_or(true) && strichartz_bounded.value_or(true) &&
           energy_bound_ok;
}

namespace {

// Uniform-in-n energy bound from the data norms: 1/2 M^2 plus a potential
// bound through the weighted Gagliardo-Nirenberg ratio K of the data.
double energy_bound_for(const ModelSpec& spec, const BaseData& base, const std::vector<int>& n_list,
                        const GridPolicy& policy, double T) {
    GridPolicy pol = policy;
    pol.finest_n = std::max(pol.finest_n, *std::max_element(n_list.begin(), n_list.end()));
    const RadialGrid grid = pol.grid_for(spec.dim, base, T);
    const auto data = initial_bump(grid, base.amplitude, base.radius, base.velocity_amplitude);
    double m2 = 0.0, k = 0.0, sup = 0.0;
    const double lambda = (spec.kind == NonlinearityKind::Power3D) ? spec.p + 1.0 : 3.0;
    for (int n : n_list) {
        const auto [phi, psi] = concentrate(data, n);
        const double h1 = h1_norm(phi), v = l2_norm(psi);
        m2 = std::max(m2, h1 * h1 + v * v);
        sup = std::max(sup, phi.sup_abs());
        if (spec.kind != NonlinearityKind::Linear && phi.sup_abs() > 0.0)
            k = std::max(k, gn_ratio(phi, spec.b, lambda).ratio);
    }
    const double m = std::sqrt(m2);
    switch (spec.kind) {
        case NonlinearityKind::Power3D: return 0.5 * m2 + k * std::pow(m, lambda) / lambda;
        case NonlinearityKind::Exp2D: return 0.5 * m2 + std::exp(sup) / 6.0 * k * std::pow(m, 3.0);
        case NonlinearityKind::Linear: return 0.5 * m2;
    }
    return 0.5 * m2;
}

}  // namespace

SweepResult sweep(const ModelSpec& spec, const BaseData& base, const std::vector<int>& n_list, double T,
                  const SweepOptions& opts) {
    if (n_list.empty()) throw DomainError("sweep needs a non-empty n_list");
    for (std::size_t i = 1; i < n_list.size(); ++i)
        if (n_list[i] <= n_list[i - 1]) throw DomainError("n_list must be strictly increasing");

    GridPolicy policy = opts.policy;
    policy.finest_n = std::max(policy.finest_n, n_list.back());

    struct Slot {
        std::optional<LinearizationRow> row;
        std::exception_ptr error;
        std::string message;
    };
    std::vector<Slot> slots(n_list.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n_list.size(); i = next++) {
            try {
                LinearizationRow row = run_pair(spec, base, n_list[i], T, policy);
                if (opts.refine_check) {
                    LinearizationRow fine = run_pair(spec, base, n_list[i], T, policy.refined());
                    fine.coarse_sup_diff_e0 = row.sup_diff_e0;
                    const double scale = std::max(std::abs(fine.sup_diff_e0), std::abs(row.sup_diff_e0));
                    fine.converged =
                        scale == 0.0 || std::abs(fine.sup_diff_e0 - row.sup_diff_e0) <= opts.convergence_tol * scale;
                    fine.verdict = fine.converged ? "ok" : "unconverged";
                    fine.runtime_s += row.runtime_s;
                    row = fine;
                }
                slots[i].row = row;
            } catch (const std::exception& e) {
                slots[i].error = std::current_exception();
                slots[i].message = e.what();
            }
        }
    };
    const int threads = std::max(1, std::min<int>(opts.threads, static_cast<int>(n_list.size())));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    }

    SweepResult result;
    for (auto& slot : slots) {
        if (slot.error) {
            result.error = slot.error;
            result.error_message = slot.message;
            break;
        }
        result.rows.push_back(*slot.row);
    }

    std::vector<double> sup, l2, stz;
    result.all_converged = true;
    for (const auto& r : result.rows) {
        sup.push_back(r.sup_diff_e0);
        l2.push_back(r.u_l2_spacetime);
        if (!std::isnan(r.strichartz_qr)) stz.push_back(r.strichartz_qr);
        result.all_converged = result.all_converged && r.converged;
    }
    result.sup_diff_trend_ok = trend_consistent(sup, opts.trend_ratio);
    if (result.rows.size() < 2) {
        result.verdict = "insufficient";
    } else if (!result.all_converged) {
        result.verdict = "unconverged";
    } else {
        result.verdict = result.sup_diff_trend_ok ? "consistent" : "inconsistent";
    }
    if (spec.dim == 2 && result.rows.size() >= 2) {
        bool dec = true;
        for (std::size_t i = 1; i < l2.size(); ++i) dec = dec && l2[i] < l2[i - 1];
        result.l2_decreasing = dec;
    }
    if (spec.dim == 3 && !stz.empty()) result.strichartz_bounded = bounded_about_median(stz);

    if (!result.rows.empty()) {
        std::vector<int> done;
        for (const auto& r : result.rows) done.push_back(r.n);
        result.energy_bound = energy_bound_for(spec, base, done, policy, T);
        result.energy_bound_ok = true;
        for (const auto& r : result.rows) result.energy_bound_ok = result.energy_bound_ok && r.total_energy <= result.energy_bound;
    }
    if (result.error) result.notes.push_back("sweep aborted: " + result.error_message);
    return result;
}

void write_sweep_csv(std::ostream& os, const SweepResult& result) {
    os << kSweepCsvHeader << '\n' << std::setprecision(17);
    for (const auto& r : result.rows) {
        os << r.n << ',' << r.sup_diff_e0 << ',' << r.u_l2_spacetime << ',' << r.u_l4b_spacetime << ','
           << r.strichartz_qr << ',' << r.data_h1 << ',' << r.data_l2 << ',' << r.grid_cells << ',' << r.verdict
           << '\n';
    }
}

}  // namespace radwave
