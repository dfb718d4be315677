#include "radwave/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include "json.hpp"
#include <numbers>
#include <ostream>
#include <sstream>

namespace radwave {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double safe_ratio(double lhs, double rhs) {
    if (lhs == 0.0) return 0.0;
    return lhs / rhs;
}

void require_nonzero(const RadialField& field, const char* who) {
    if (field.sup_abs() == 0.0) throw DomainError(std::string(who) + ": field is identically zero");
}

// e^u - 1 - u without cancellation for small |u|.
double exp_minus_linear(double u) {
    if (std::abs(u) < 0.1) {
        double term = 0.5 * u * u, sum = 0.0;
        for (int k = 2; k < 20; ++k) {
            sum += term;
            term *= u / (k + 1);
        }
        return sum;
    }
    return std::expm1(u) - u;
}

}  // namespace

bool InequalityVerdict::has_flag(const std::string& f) const {
    return std::find(flags.begin(), flags.end(), f) != flags.end();
}

InequalityVerdict strauss_ratio(const RadialField& field) {
    require_nonzero(field, "strauss_ratio");
    const int n = field.grid().dim();
    InequalityVerdict v;
    v.name = "strauss";
    v.lhs = weighted_sup(field, 0.5 * (n - 1));
    v.rhs_factor = std::sqrt(grad_l2_norm(field)) * std::sqrt(l2_norm(field));
    v.ratio = safe_ratio(v.lhs, v.rhs_factor);
    v.params = {{"N", n}};
    v.grid_cells = field.grid().num_cells();
    return v;
}

InequalityVerdict mt_subcritical_ratio(const RadialField& field, double alpha, double beta) {
    if (field.grid().dim() != 2) throw DomainError("mt_subcritical_ratio is a 2D inequality");
    if (!(beta >= 0.0) || !(beta < 2.0)) throw DomainError("singular Moser-Trudinger weight needs 0 <= beta < 2");
    InequalityVerdict v;
    v.name = "mt_subcritical";
    v.params = {{"alpha", alpha}, {"beta", beta}};
    v.grid_cells = field.grid().num_cells();
    if (!(alpha > 0.0) || !(alpha < kTwoPi * (2.0 - beta))) v.flags.push_back("out-of-regime");

    RadialField u = field;
    const double grad = grad_l2_norm(u);
    if (grad > 1.0 + 1e-9) {
        u *= 1.0 / grad;
        v.flags.push_back("rescaled");
        v.params["rescale"] = 1.0 / grad;
    }
    v.lhs = singular_weighted_integral(u, -beta, [alpha](double x) { return std::expm1(alpha * x * x); });
    v.rhs_factor = singular_weighted_integral(u, -beta, [](double x) { return x * x; });
    v.ratio = safe_ratio(v.lhs, v.rhs_factor);
    return v;
}

double moser_plateau_radius(int n, double beta) {
    const double gamma = 0.5 * (2.0 - beta);
    return std::pow(static_cast<double>(n), -1.0 / gamma);
}

RadialField moser_field(const RadialGrid& grid, int n, double beta) {
    if (grid.dim() != 2) throw DomainError("moser_field lives in 2D");
    if (n < 2) throw DomainError("moser_field needs n >= 2");
    if (!(beta >= 0.0) || !(beta < 2.0)) throw DomainError("moser_field needs 0 <= beta < 2");
    if (grid.r_max() < 1.0) throw DomainError("moser_field needs r_max >= 1");
    const double plateau = moser_plateau_radius(n, beta);
    if (plateau / grid.spacing() < 8.0) {
        std::ostringstream os;
        os << "Moser plateau radius " << plateau << " spans " << plateau / grid.spacing()
           << " cells (need >= 8)";
        throw ResolutionError(os.str());
    }
    const double gamma = 0.5 * (2.0 - beta);
    const double log_n = std::log(static_cast<double>(n));
    const double a = 1.0 / std::sqrt(kTwoPi);
    const double scale = 1.0 / std::sqrt(gamma);
    return RadialField::sample(grid, [&](double r) {
        if (r >= 1.0) return 0.0;
        if (r <= plateau) return scale * a * std::sqrt(log_n);
        // log(1/s) with s = r^gamma
        return scale * a * gamma * std::log(1.0 / r) / std::sqrt(log_n);
    });
}

std::vector<MoserSweepRow> mt_sharpness_sweep(double beta, double eps, const std::vector<int>& n_list,
                                              const MoserSweepOptions& opts) {
    if (!(beta >= 0.0) || !(beta < 2.0)) throw DomainError("mt_sharpness_sweep needs 0 <= beta < 2");
    if (!(eps >= 0.0)) throw DomainError("mt_sharpness_sweep needs eps >= 0");
    if (n_list.empty()) return {};
    const int finest = *std::max_element(n_list.begin(), n_list.end());
    const double shape_beta = opts.adapted ? beta : 0.0;
    const double dr = moser_plateau_radius(finest, shape_beta) / static_cast<double>(opts.plateau_cells);
    const double want = std::ceil(opts.r_max / dr);
    if (!(want <= static_cast<double>(opts.max_cells))) {
        std::ostringstream os;
        os << "Moser sweep to n = " << finest << " at beta = " << shape_beta << " needs " << want
           << " cells (budget " << opts.max_cells << ")";
        throw ResolutionError(os.str());
    }
    const auto cells = static_cast<std::size_t>(want);
    const RadialGrid grid(2, static_cast<double>(cells) * dr, cells);
    const double alpha = kTwoPi * (2.0 - beta) + eps;

    std::vector<MoserSweepRow> rows;
    for (int n : n_list) {
        RadialField m = moser_field(grid, n, shape_beta);
        MoserSweepRow row;
        row.n = n;
        row.grid_cells = cells;
        row.grad_norm = grad_l2_norm(m);
        row.h1_before_normalization = h1_norm(m);
        m *= 1.0 / row.h1_before_normalization;
        try {
            row.lhs = singular_weighted_integral(m, -beta, [alpha](double x) { return std::expm1(alpha * x * x); });
        } catch (const NonFiniteError&) {
            row.lhs = std::numeric_limits<double>::infinity();
        }
        rows.push_back(row);
    }
    return rows;
}

MtSupremumSearch mt_supremum_lower_bound(double beta, int max_iterations) {
    if (!(beta >= 0.0) || !(beta < 2.0)) throw DomainError("mt_supremum_lower_bound needs 0 <= beta < 2");
    const double alpha = kTwoPi * (2.0 - beta);

    struct Eval {
        double value;
        double height;
    };
    auto evaluate = [&](double log_a, double log_b) -> Eval {
        const double a = std::exp(log_a), b = std::exp(log_b);
        const double dr = a / 16.0;
        const auto cells = static_cast<std::size_t>(std::ceil(1.05 * b / dr)) + 8;
        const RadialGrid grid(2, static_cast<double>(cells) * dr, cells);
        const double span = std::log(b / a);
        RadialField u = RadialField::sample(grid, [&](double r) {
            if (r <= a) return 1.0;
            if (r >= b) return 0.0;
            return std::log(b / r) / span;
        });
        const double h1 = h1_norm(u);
        u *= 1.0 / h1;
        try {
            return {singular_weighted_integral(u, -beta, [alpha](double x) { return std::expm1(alpha * x * x); }),
                    1.0 / h1};
        } catch (const NonFiniteError&) {
            return {0.0, 1.0 / h1};
        }
    };

    // log a in [log 1e-4, log b - log 1.5], log b in [log a + log 1.5, log 10]
    double log_a = std::log(0.05), log_b = std::log(1.0);
    const double lo_a = std::log(1e-4), hi_b = std::log(10.0), gap = std::log(1.5);
    Eval best = evaluate(log_a, log_b);
    double step = 0.5;
    MtSupremumSearch out;
    int it = 0;
    for (; it < max_iterations && step > 1e-3; ++it) {
        bool improved = false;
        for (int coord = 0; coord < 2; ++coord) {
            for (double dir : {+1.0, -1.0}) {
                double na = log_a, nb = log_b;
                (coord == 0 ? na : nb) += dir * step;
                if (na < lo_a || nb > hi_b || nb - na < gap) continue;
                const Eval e = evaluate(na, nb);
                if (e.value > best.value) {
                    best = e;
                    log_a = na;
                    log_b = nb;
                    improved = true;
                }
            }
        }
        if (!improved) step *= 0.5;
    }
    out.value = best.value;
    out.plateau_height = best.height;
    out.inner_radius = std::exp(log_a);
    out.outer_radius = std::exp(log_b);
    out.iterations = it;
    return out;
}

GnExponents gn_exponents(int dim, double theta, double lambda) {
    const double n = dim;
    GnExponents e;
    e.B = n * (lambda - 2.0) / 2.0 - theta;
    e.A = lambda - e.B;
    e.printed_A = 2.0 + theta - (n - 2.0) / 2.0 * lambda;
    e.valid = theta >= 0.0 && lambda > 0.0 && dim >= 2 && lambda >= 2.0 + 2.0 * theta / (n - 1.0) &&
              (dim < 3 || lambda <= (2.0 * n + 2.0 * theta) / (n - 2.0));
    return e;
}

std::string gn_discrepancy_report(int dim, double theta, double lambda) {
    const GnExponents e = gn_exponents(dim, theta, lambda);
    std::ostringstream os;
    os << std::setprecision(12) << "GN exponents (N=" << dim << ", theta=" << theta << ", lambda=" << lambda
       << "): A = " << e.A << ", B = " << e.B << "; alternative A = 2+theta-(N-2)lambda/2 = " << e.printed_A;
    if (std::abs(e.A - e.printed_A) > 1e-12) {
        os << " DIFFERS by " << e.A - e.printed_A << "; with it A+B = " << e.printed_A + e.B << " != lambda = "
           << lambda << ", so the inequality would not be amplitude homogeneous";
    } else {
        os << " (agrees)";
    }
    return os.str();
}

InequalityVerdict gn_ratio(const RadialField& field, double theta, double lambda) {
    const int n = field.grid().dim();
    const GnExponents e = gn_exponents(n, theta, lambda);
    if (!e.valid) {
        std::ostringstream os;
        os << "Gagliardo-Nirenberg exponents out of range: N=" << n << ", theta=" << theta << ", lambda=" << lambda;
        throw DomainError(os.str());
    }
    require_nonzero(field, "gn_ratio");
    InequalityVerdict v;
    v.name = "gagliardo_nirenberg";
    v.params = {{"N", n}, {"theta", theta}, {"lambda", lambda}, {"A", e.A}, {"B", e.B}, {"printed_A", e.printed_A}};
    if (std::abs(e.A - e.printed_A) > 1e-12) {
        v.flags.push_back("printed-A-discrepancy");
        v.witness = gn_discrepancy_report(n, theta, lambda);
    }
    v.lhs = weighted_integral(field, theta, [lambda](double x) { return std::pow(std::abs(x), lambda); });
    v.rhs_factor = std::pow(l2_norm(field), e.A) * std::pow(grad_l2_norm(field), e.B);
    v.ratio = safe_ratio(v.lhs, v.rhs_factor);
    v.grid_cells = field.grid().num_cells();
    return v;
}

double k_alpha_integrand(double alpha, double s) {
    if (s == 0.0) return 1.0 / (2.0 * alpha);
    const double num = exp_minus_linear(s);
    const double expo = alpha * s * s;
    if (expo < 700.0 && num < 1e300) return num / std::expm1(expo);
    // Both sides huge: work with logarithms. num > 0 for s != 0.
    const double log_num = (s > 30.0) ? s + std::log1p(-(1.0 + s) * std::exp(-s)) : std::log(num);
    return std::exp(log_num - expo);
}

KAlphaResult k_alpha(double alpha, const KAlphaOptions& opts) {
    if (!(alpha > 0.0)) throw DomainError("k_alpha needs alpha > 0");
    if (opts.scan_points < 5) throw DomainError("k_alpha needs at least 5 scan points");
    double lo = -50.0, hi = 50.0 / std::min(alpha, 1.0);
    for (int widen = 0; widen <= opts.max_widenings; ++widen) {
        const std::size_t m = opts.scan_points;
        const double h = (hi - lo) / static_cast<double>(m - 1);
        std::size_t best = 0;
        double best_val = -1.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double val = k_alpha_integrand(alpha, lo + h * static_cast<double>(i));
            if (val > best_val) {
                best_val = val;
                best = i;
            }
        }
        // The removable point s = 0 is a candidate even off-grid.
        if (k_alpha_integrand(alpha, 0.0) > best_val && 0.0 > lo && 0.0 < hi) {
            best_val = k_alpha_integrand(alpha, 0.0);
            best = static_cast<std::size_t>(std::lround(-lo / h));
        }
        if (best <= 1 || best + 2 >= m) {
            lo *= 2.0;
            hi *= 2.0;
            continue;
        }
        // Golden-section maximization on the bracket around the best sample.
        double a = lo + h * static_cast<double>(best - 1);
        double b = lo + h * static_cast<double>(best + 1);
        const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
        double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
        double fc = k_alpha_integrand(alpha, c), fd = k_alpha_integrand(alpha, d);
        for (int it = 0; it < 200 && (b - a) > 1e-13 * std::max(1.0, std::abs(a)); ++it) {
            if (fc > fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - inv_phi * (b - a);
                fc = k_alpha_integrand(alpha, c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + inv_phi * (b - a);
                fd = k_alpha_integrand(alpha, d);
            }
        }
        const double s_star = 0.5 * (a + b);
        const double refined = k_alpha_integrand(alpha, s_star);
        KAlphaResult r;
        r.window_lo = lo;
        r.window_hi = hi;
        r.widenings = widen;
        if (refined >= best_val) {
            r.value = refined;
            r.argmax = s_star;
        } else {
            r.value = best_val;
            r.argmax = lo + h * static_cast<double>(best);
        }
        return r;
    }
    throw DomainError("k_alpha: maximizer kept hitting the scan window edge after widening");
}

InequalityVerdict tech2d_ratio(const RadialField& field, double b, double alpha) {
    if (field.grid().dim() != 2) throw DomainError("tech2d_ratio is a 2D estimate");
    if (!(b > 0.0) || !(b <= 1.0)) throw DomainError("tech2d_ratio needs 0 < b <= 1");
    if (!(alpha > 0.0)) throw DomainError("tech2d_ratio needs alpha > 0");
    InequalityVerdict v;
    v.name = "tech2d";
    v.params = {{"b", b}, {"alpha", alpha}};
    v.grid_cells = field.grid().num_cells();
    if (field.sup_abs() == 0.0) return v;

    const double h1 = h1_norm(field);
    const double norm_factor = std::pow(h1, 2.0 * b);
    const auto& g = field.grid();
    for (std::size_t j = 1; j < field.size(); ++j) {
        const double u = field[j];
        if (u == 0.0) continue;
        const double lhs = std::pow(g.node(j), b) * std::abs(exp_minus_linear(u));
        const double rhs = norm_factor * (std::pow(std::abs(u), 2.0 * (1.0 - b)) + std::expm1(alpha * u * u));
        const double ratio = lhs / rhs;
        if (ratio > v.ratio) {
            v.ratio = ratio;
            v.lhs = lhs;
            v.rhs_factor = rhs;
            v.params["r_at_max"] = g.node(j);
        }
    }
    return v;
}

StrichartzDiagnostic strichartz_diagnostic(const Trajectory& traj, const ModelSpec& spec, double q, double r) {
    if (!admissible_pair_check(q, r)) {
        std::ostringstream os;
        os << "(q, r) = (" << q << ", " << r << ") is not wave-admissible";
        throw DomainError(os.str());
    }
    if (traj.snapshots.empty()) throw DomainError("strichartz_diagnostic needs stored snapshots");
    if (std::isinf(q)) throw DomainError("strichartz_diagnostic: q = inf not supported");
    const double qp = q / (q - 1.0), rp = r / (r - 1.0);
    const auto& g = traj.grid;
    RadialWaveOperator op(g, spec);  // validates spec/grid
    std::vector<double> rb(g.num_nodes());
    for (std::size_t j = 0; j < rb.size(); ++j) {
        const double x = g.node(j);
        rb[j] = (x == 0.0) ? (spec.b == 0.0 ? 1.0 : 0.0) : std::pow(x, spec.b);
    }

    double lhs_int = 0.0, forcing_int = 0.0, prev_l = 0.0, prev_f = 0.0;
    for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
        const FieldState& s = traj.snapshots[k];
        RadialField force(g);
        for (std::size_t j = 0; j < force.size(); ++j)
            force[j] = rb[j] * f_eval(spec, s.u[j]) - spec.mass * s.u[j];
        const double l = std::pow(lp_norm(s.u, r), q);
        const double f = std::pow(lp_norm(force, rp), qp);
        if (k > 0) {
            const double dt = s.t - traj.snapshots[k - 1].t;
            lhs_int += 0.5 * dt * (prev_l + l);
            forcing_int += 0.5 * dt * (prev_f + f);
        }
        prev_l = l;
        prev_f = f;
    }
    StrichartzDiagnostic d;
    d.lhs = std::pow(lhs_int, 1.0 / q);
    d.forcing = std::pow(forcing_int, 1.0 / qp);
    d.data_gradient = grad_l2_norm(traj.snapshots.front().u);
    d.data_velocity = l2_norm(traj.snapshots.front().v);
    d.rhs_factor = d.data_gradient + d.data_velocity + d.forcing;
    d.ratio = safe_ratio(d.lhs, d.rhs_factor);
    return d;
}

void write_verdicts_csv(std::ostream& os, const std::vector<InequalityVerdict>& verdicts) {
    os << kVerdictCsvHeader << '\n' << std::setprecision(17);
    for (const auto& v : verdicts) {
        nlohmann::json params(v.params);
        std::string js = params.dump();
        std::string quoted;
        for (char c : js) {
            if (c == '"') quoted += '"';
            quoted += c;
        }
        os << v.name << ",\"" << quoted << "\"," << v.lhs << ',' << v.rhs_factor << ',' << v.ratio << ','
           << v.grid_cells << '\n';
    }
}

}  // namespace radwave
