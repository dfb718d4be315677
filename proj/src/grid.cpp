#include "radwave/grid.hpp"

#include <algorithm>
#include <numbers>
#include <sstream>

namespace radwave {

OverflowError::OverflowError(double u, std::optional<double> t, std::optional<double> r)
    : Error([&] {
          std::ostringstream os;
          os.precision(17);
          os << "exponential overflow: u = " << u << " exceeds the e^u guard";
          if (t) os << " at t = " << *t;
          if (r) os << ", r = " << *r;
          return os.str();
      }()),
      u_(u), t_(t), r_(r) {}

RadialGrid::RadialGrid(int dim, double r_max, std::size_t num_cells)
    : dim_(dim), r_max_(r_max), num_cells_(num_cells), spacing_(0.0) {
    if (dim != 2 && dim != 3)
        throw DomainError("unsupported dimension " + std::to_string(dim) + " (expected 2 or 3)");
    if (!(r_max > 0.0) || !std::isfinite(r_max))
        throw DomainError("r_max must be positive and finite");
    if (num_cells < 8)
        throw DomainError("num_cells must be at least 8, got " + std::to_string(num_cells));
    spacing_ = r_max / static_cast<double>(num_cells);
}

std::vector<double> RadialGrid::nodes() const {
    std::vector<double> r(num_nodes());
    for (std::size_t j = 0; j < r.size(); ++j) r[j] = node(j);
    return r;
}

double RadialGrid::sphere_area() const noexcept {
    return dim_ == 2 ? 2.0 * std::numbers::pi : 4.0 * std::numbers::pi;
}

RadialGrid build_grid(int dim, double r_max, std::size_t num_cells) {
    return RadialGrid(dim, r_max, num_cells);
}

RadialField::RadialField(RadialGrid grid)
    : grid_(grid), values_(grid.num_nodes(), 0.0) {}

RadialField::RadialField(RadialGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.num_nodes())
        throw DomainError("field has " + std::to_string(values_.size()) + " samples, grid has " +
                          std::to_string(grid_.num_nodes()) + " nodes");
    for (std::size_t j = 0; j < values_.size(); ++j)
        if (!std::isfinite(values_[j]))
            throw NonFiniteError("non-finite field sample at node " + std::to_string(j), j);
}

RadialField& RadialField::operator*=(double s) {
    for (double& x : values_) x *= s;
    return *this;
}

namespace {
void require_same_grid(const RadialField& a, const RadialField& b) {
    if (!(a.grid() == b.grid())) throw DomainError("fields live on different grids");
}
}  // namespace

RadialField operator-(const RadialField& a, const RadialField& b) {
    require_same_grid(a, b);
    RadialField out(a);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] -= b[j];
    return out;
}

RadialField operator+(const RadialField& a, const RadialField& b) {
    require_same_grid(a, b);
    RadialField out(a);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += b[j];
    return out;
}

double RadialField::sup_abs() const noexcept {
    double m = 0.0;
    for (double x : values_) m = std::max(m, std::abs(x));
    return m;
}

namespace {

double checked(double value, std::size_t node, double r) {
    if (!std::isfinite(value)) {
        std::ostringstream os;
        os << "non-finite integrand at node " << node << " (r = " << r << ")";
        throw NonFiniteError(os.str(), node);
    }
    return value;
}

}  // namespace

double weighted_integral(const RadialField& field, double weight_exponent,
                         const std::function<double(double)>& transform) {
    if (weight_exponent < 0.0)
        throw DomainError("weighted_integral needs a non-negative weight exponent");
    const auto& g = field.grid();
    const double power = g.dim() - 1 + weight_exponent;
    const std::size_t m = g.num_cells();
    double sum = 0.0;
    for (std::size_t j = 0; j <= m; ++j) {
        const double r = g.node(j);
        const double value = checked(transform(field[j]), j, r);
        const double w = (j == 0 || j == m) ? 0.5 : 1.0;
        // r^power at r = 0 is 0 for power > 0 and 1 for power == 0.
        const double rw = (r == 0.0) ? (power == 0.0 ? 1.0 : 0.0) : std::pow(r, power);
        sum += w * value * rw;
    }
    return g.sphere_area() * g.spacing() * sum;
}

double singular_weighted_integral(const RadialField& field, double weight_exponent,
                                  const std::function<double(double)>& transform) {
    const auto& g = field.grid();
    const double s = g.dim() - 1 + weight_exponent;
    if (!(s > -1.0)) throw DomainError("radial weight r^s with s <= -1 is not integrable");
    const double dr = g.spacing();
    const std::size_t m = g.num_cells();

    const double g0 = checked(transform(field[0]), 0, 0.0);
    const double g1 = checked(transform(field[1]), 1, dr);
    double sum = std::pow(dr, s + 1.0) * (g0 * (1.0 / (s + 1.0) - 1.0 / (s + 2.0)) + g1 / (s + 2.0));

    double trap = 0.5 * g1 * std::pow(dr, s);
    for (std::size_t j = 2; j <= m; ++j) {
        const double r = g.node(j);
        const double value = checked(transform(field[j]), j, r) * std::pow(r, s);
        trap += (j == m ? 0.5 : 1.0) * value;
    }
    sum += dr * trap;
    return g.sphere_area() * sum;
}

double l2_norm(const RadialField& field) {
    return std::sqrt(weighted_integral(field, 0.0, [](double u) { return u * u; }));
}

std::vector<double> radial_gradient(const RadialField& field) {
    const auto& g = field.grid();
    const std::size_t m = g.num_cells();
    const double dr = g.spacing();
    std::vector<double> du(m + 1, 0.0);
    for (std::size_t j = 1; j < m; ++j) du[j] = (field[j + 1] - field[j - 1]) / (2.0 * dr);
    du[m] = (field[m] - field[m - 1]) / dr;
    return du;
}

double grad_l2_norm(const RadialField& field) {
    RadialField du(field.grid(), radial_gradient(field));
    return l2_norm(du);
}

double h1_norm(const RadialField& field) {
    const double a = l2_norm(field);
    const double b = grad_l2_norm(field);
    return std::sqrt(a * a + b * b);
}

double lp_norm(const RadialField& field, double p) {
    if (!(p >= 1.0)) throw DomainError("lp_norm needs p >= 1");
    const double integral = weighted_integral(field, 0.0, [p](double u) { return std::pow(std::abs(u), p); });
    return std::pow(integral, 1.0 / p);
}

double weighted_sup(const RadialField& field, double exponent) {
    if (exponent < 0.0) throw DomainError("weighted_sup needs a non-negative exponent");
    const auto& g = field.grid();
    double best = 0.0;
    for (std::size_t j = 0; j < field.size(); ++j) {
        const double r = g.node(j);
        const double w = (r == 0.0) ? (exponent == 0.0 ? 1.0 : 0.0) : std::pow(r, exponent);
        best = std::max(best, w * std::abs(field[j]));
    }
    return best;
}

double support_radius(const RadialField& field, double threshold) {
    for (std::size_t j = field.size(); j-- > 0;)
        if (std::abs(field[j]) > threshold) return field.grid().node(j);
    return 0.0;
}

}  // namespace radwave
